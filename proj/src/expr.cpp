#include "perfun/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <sstream>

#include "perfun/errors.hpp"

namespace perfun {

struct ExprAccess {
    static const ExprNode& node(const Expr& e) { return *e.node_; }
    // placeholder child of leaf nodes
    static Expr empty() { return Expr(nullptr, 0); }
};

struct ExprNode {
    Op op = Op::Const;
    double value = 0.0;  // Const
    int index = 0;       // Var: variable index; Pow: exponent
    Expr a = ExprAccess::empty();
    Expr b = ExprAccess::empty();
};

namespace {

bool isBinary(Op op) {
    return op == Op::Add || op == Op::Sub || op == Op::Mul || op == Op::Div || op == Op::Pow;
}

const char* opName(Op op) {
    switch (op) {
    case Op::Const: return "const";
    case Op::Var: return "var";
    case Op::Neg: return "neg";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Exp: return "exp";
    case Op::Ln: return "ln";
    case Op::Sqrt: return "sqrt";
    case Op::Sign: return "sign";
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Mul: return "mul";
    case Op::Div: return "div";
    case Op::Pow: return "pow";
    }
    return "?";
}

std::string formatNumber(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    // prefer the shortest representation that round-trips
    for (int prec = 1; prec <= 17; ++prec) {
        char tmp[32];
        std::snprintf(tmp, sizeof tmp, "%.*g", prec, v);
        if (std::strtod(tmp, nullptr) == v) return tmp;
    }
    return buf;
}

const char* varName(int index, int arity) {
    if (arity == 1) return "t";
    return index == 0 ? "x" : "y";
}

inline double liftConst(const double&, double v) { return v; }
inline Jet1 liftConst(const Jet1& proto, double v) { return proto.lift(v); }
inline Jet2 liftConst(const Jet2& proto, double v) { return proto.lift(v); }

double divide(double a, double b) {
    if (b == 0.0) throw EvalError("division by zero");
    return a / b;
}
template <class J>
J divide(const J& a, const J& b) { return a / b; }

double lnOf(double v) { return checkedLog(v); }
template <class J>
J lnOf(const J& v) { return log(v); }

double sqrtOf(double v) { return checkedSqrt(v); }
template <class J>
J sqrtOf(const J& v) { return sqrt(v); }

template <class T>
T evalNode(const ExprNode& n, std::span<const T> vars) {
    using std::cos;
    using std::exp;
    using std::sin;
    switch (n.op) {
    case Op::Const: return liftConst(vars[0], n.value);
    case Op::Var: return vars[static_cast<std::size_t>(n.index)];
    default: break;
    }
    const T a = evalNode<T>(ExprAccess::node(n.a), vars);
    switch (n.op) {
    case Op::Neg: return -a;
    case Op::Sin: return sin(a);
    case Op::Cos: return cos(a);
    case Op::Exp: return exp(a);
    case Op::Ln: return lnOf(a);
    case Op::Sqrt: return sqrtOf(a);
    case Op::Sign: return signum(a);
    case Op::Pow: return ipow(a, n.index);
    default: break;
    }
    const T b = evalNode<T>(ExprAccess::node(n.b), vars);
    switch (n.op) {
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::Div: return divide(a, b);
    default: break;
    }
    throw EvalError("malformed expression node");
}

}  // namespace

namespace {
std::shared_ptr<const ExprNode> zeroNode() {
    static const auto z = std::make_shared<const ExprNode>();
    return z;
}
}  // namespace

Expr::Expr() : node_(zeroNode()), arity_(2) {}

Expr Expr::constant(double value, int arity) {
    auto n = std::make_shared<ExprNode>();
    n->op = Op::Const;
    n->value = value;
    return Expr(std::move(n), arity);
}

Expr Expr::variable(int index, int arity) {
    if (index < 0 || index >= arity) throw PreconditionError("variable index out of range");
    auto n = std::make_shared<ExprNode>();
    n->op = Op::Var;
    n->index = index;
    return Expr(std::move(n), arity);
}

Expr Expr::make(Op op, Expr a, Expr b) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    const int arity = a.arity_;
    n->a = std::move(a);
    n->b = std::move(b);
    return Expr(std::move(n), arity);
}

Op Expr::op() const { return node_->op; }
double Expr::constantValue() const { return node_->value; }
int Expr::variableIndex() const { return node_->index; }
int Expr::exponent() const { return node_->index; }
Expr Expr::operand(int k) const { return k == 0 ? node_->a : node_->b; }

double Expr::eval(std::span<const double> vars) const {
    if (static_cast<int>(vars.size()) != arity_) throw PreconditionError("wrong number of variables");
    return evalNode<double>(*node_, vars);
}

double Expr::operator()(double t) const {
    if (arity_ != 1) throw PreconditionError("expression is not univariate");
    return evalNode<double>(*node_, std::span<const double>(&t, 1));
}

double Expr::operator()(Point p) const {
    if (arity_ != 2) throw PreconditionError("expression is not bivariate");
    const double v[2] = {p.x, p.y};
    return evalNode<double>(*node_, std::span<const double>(v, 2));
}

Jet1 Expr::jet1(double t0, int order) const {
    if (arity_ != 1) throw PreconditionError("expression is not univariate");
    const Jet1 t = Jet1::variable(t0, order);
    return evalNode<Jet1>(*node_, std::span<const Jet1>(&t, 1));
}

Jet2 Expr::jet2(Point p, int order) const {
    if (arity_ != 2) throw PreconditionError("expression is not bivariate");
    const Jet2 v[2] = {Jet2::variable(0, p, order), Jet2::variable(1, p, order)};
    return evalNode<Jet2>(*node_, std::span<const Jet2>(v, 2));
}

// ------------------------------------------------------------ builders with folding

namespace {
bool isConst(const Expr& e, double v) { return e.isConstant() && e.constantValue() == v; }
}  // namespace

Expr operator+(const Expr& a, const Expr& b) {
    if (a.isConstant() && b.isConstant()) return Expr::constant(a.constantValue() + b.constantValue(), a.arity_);
    if (isConst(a, 0.0)) return b;
    if (isConst(b, 0.0)) return a;
    return Expr::make(Op::Add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
    if (a.isConstant() && b.isConstant()) return Expr::constant(a.constantValue() - b.constantValue(), a.arity_);
    if (isConst(b, 0.0)) return a;
    if (isConst(a, 0.0)) return -b;
    return Expr::make(Op::Sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
    if (a.isConstant() && b.isConstant()) return Expr::constant(a.constantValue() * b.constantValue(), a.arity_);
    if (isConst(a, 0.0) || isConst(b, 0.0)) return Expr::constant(0.0, a.arity_);
    if (isConst(a, 1.0)) return b;
    if (isConst(b, 1.0)) return a;
    if (isConst(a, -1.0)) return -b;
    if (isConst(b, -1.0)) return -a;
    return Expr::make(Op::Mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
    if (a.isConstant() && b.isConstant() && b.constantValue() != 0.0)
        return Expr::constant(a.constantValue() / b.constantValue(), a.arity_);
    if (isConst(b, 1.0)) return a;
    if (isConst(a, 0.0) && !(b.isConstant() && b.constantValue() == 0.0)) return a;
    return Expr::make(Op::Div, a, b);
}

Expr operator-(const Expr& a) {
    if (a.isConstant()) return Expr::constant(-a.constantValue(), a.arity_);
    if (a.op() == Op::Neg) return a.operand(0);
    return Expr::make(Op::Neg, a);
}

Expr pow(const Expr& a, int n) {
    if (n == 0) return Expr::constant(1.0, a.arity_);
    if (n == 1) return a;
    if (a.isConstant() && (a.constantValue() != 0.0 || n > 0))
        return Expr::constant(ipow(a.constantValue(), n), a.arity_);
    auto node = std::make_shared<ExprNode>();
    node->op = Op::Pow;
    node->index = n;
    node->a = a;
    return Expr(std::move(node), a.arity_);
}

Expr sin(const Expr& a) {
    if (a.isConstant()) return Expr::constant(std::sin(a.constantValue()), a.arity_);
    return Expr::make(Op::Sin, a);
}
Expr cos(const Expr& a) {
    if (a.isConstant()) return Expr::constant(std::cos(a.constantValue()), a.arity_);
    return Expr::make(Op::Cos, a);
}
Expr exp(const Expr& a) {
    if (a.isConstant()) return Expr::constant(std::exp(a.constantValue()), a.arity_);
    return Expr::make(Op::Exp, a);
}
Expr ln(const Expr& a) {
    if (a.isConstant() && a.constantValue() > 0.0) return Expr::constant(std::log(a.constantValue()), a.arity_);
    return Expr::make(Op::Ln, a);
}
Expr sqrt(const Expr& a) {
    if (a.isConstant() && a.constantValue() >= 0.0) return Expr::constant(std::sqrt(a.constantValue()), a.arity_);
    return Expr::make(Op::Sqrt, a);
}
Expr sign(const Expr& a) {
    if (a.isConstant()) return Expr::constant(signum(a.constantValue()), a.arity_);
    return Expr::make(Op::Sign, a);
}

// ------------------------------------------------------------ calculus / rewriting

Expr Expr::derivative(int index) const {
    const ExprNode& n = *node_;
    const int ar = arity_;
    switch (n.op) {
    case Op::Const: return constant(0.0, ar);
    case Op::Var: return constant(n.index == index ? 1.0 : 0.0, ar);
    default: break;
    }
    const Expr& a = n.a;
    const Expr da = a.derivative(index);
    switch (n.op) {
    case Op::Neg: return -da;
    case Op::Sin: return cos(a) * da;
    case Op::Cos: return -(sin(a) * da);
    case Op::Exp: return *this * da;
    case Op::Ln: return da / a;
    case Op::Sqrt: return da / (2.0 * *this);
    case Op::Sign: throw EvalError("sign() cannot be differentiated symbolically");
    case Op::Pow: return (static_cast<double>(n.index) * pow(a, n.index - 1)) * da;
    default: break;
    }
    const Expr& b = n.b;
    const Expr db = b.derivative(index);
    switch (n.op) {
    case Op::Add: return da + db;
    case Op::Sub: return da - db;
    case Op::Mul: return da * b + a * db;
    case Op::Div:
        if (db.isConstant() && db.constantValue() == 0.0) return da / b;
        return (da * b - a * db) / pow(b, 2);
    default: break;
    }
    throw EvalError("malformed expression node");
}

Expr Expr::remap(int newArity, std::span<const int> mapping) const {
    const ExprNode& n = *node_;
    switch (n.op) {
    case Op::Const: return constant(n.value, newArity);
    case Op::Var: return variable(mapping[static_cast<std::size_t>(n.index)], newArity);
    default: break;
    }
    const Expr a = n.a.remap(newArity, mapping);
    switch (n.op) {
    case Op::Neg: return make(Op::Neg, a);
    case Op::Sin: return make(Op::Sin, a);
    case Op::Cos: return make(Op::Cos, a);
    case Op::Exp: return make(Op::Exp, a);
    case Op::Ln: return make(Op::Ln, a);
    case Op::Sqrt: return make(Op::Sqrt, a);
    case Op::Sign: return make(Op::Sign, a);
    case Op::Pow: return pow(a, n.index);
    default: break;
    }
    return make(n.op, a, n.b.remap(newArity, mapping));
}

bool Expr::containsSign() const {
    const ExprNode& n = *node_;
    if (n.op == Op::Sign) return true;
    if (n.op == Op::Const || n.op == Op::Var) return false;
    return n.a.containsSign() || (isBinary(n.op) && n.op != Op::Pow && n.b.containsSign());
}

std::size_t Expr::nodeCount() const {
    const ExprNode& n = *node_;
    if (n.op == Op::Const || n.op == Op::Var) return 1;
    std::size_t c = 1 + n.a.nodeCount();
    if (isBinary(n.op) && n.op != Op::Pow) c += n.b.nodeCount();
    return c;
}

std::string Expr::structure() const {
    const ExprNode& n = *node_;
    switch (n.op) {
    case Op::Const: return formatNumber(n.value);
    case Op::Var: return varName(n.index, arity_);
    case Op::Pow: return "pow(" + n.a.structure() + ", " + std::to_string(n.index) + ")";
    default: break;
    }
    if (isBinary(n.op))
        return std::string(opName(n.op)) + "(" + n.a.structure() + ", " + n.b.structure() + ")";
    return std::string(opName(n.op)) + "(" + n.a.structure() + ")";
}

namespace {
int precedence(Op op) {
    switch (op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    default: return 5;
    }
}
}  // namespace

std::string Expr::str() const {
    const ExprNode& n = *node_;
    auto wrap = [](const Expr& e, int minPrec) {
        const std::string s = e.str();
        const bool negConst = e.isConstant() && e.constantValue() < 0.0;
        if (precedence(e.op()) < minPrec || (negConst && minPrec > 1)) return "(" + s + ")";
        return s;
    };
    switch (n.op) {
    case Op::Const: return formatNumber(n.value);
    case Op::Var: return varName(n.index, arity_);
    case Op::Neg: return "-" + wrap(n.a, 4);
    case Op::Pow: return wrap(n.a, 5) + "^" + (n.index < 0 ? "(" + std::to_string(n.index) + ")" : std::to_string(n.index));
    case Op::Add: return n.a.str() + " + " + wrap(n.b, 2);
    case Op::Sub: return n.a.str() + " - " + wrap(n.b, 2);
    case Op::Mul: return wrap(n.a, 2) + "*" + wrap(n.b, 3);
    case Op::Div: return wrap(n.a, 2) + "/" + wrap(n.b, 3);
    default: return std::string(opName(n.op)) + "(" + n.a.str() + ")";
    }
}

// ------------------------------------------------------------ parser

namespace {

class Parser {
public:
    Parser(std::string_view src, const std::vector<std::string>& names)
        : src_(src), names_(names), arity_(static_cast<int>(names.size())) {}

    Expr parse() {
        skipSpace();
        if (pos_ >= src_.size()) throw ParseError("empty expression", 0);
        Expr e = parseExpr();
        skipSpace();
        if (pos_ < src_.size()) {
            if (src_[pos_] == ')') throw ParseError("unbalanced parenthesis: unexpected ')'", pos_);
            throw ParseError(std::string("unexpected '") + src_[pos_] + "'", pos_);
        }
        return e;
    }

private:
    void skipSpace() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skipSpace();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expectClose(std::size_t openPos) {
        skipSpace();
        if (pos_ >= src_.size())
            throw ParseError("unbalanced parenthesis: missing ')' at end of input (opened at " +
                                 std::to_string(openPos) + ")",
                             pos_);
        if (src_[pos_] != ')') throw ParseError(std::string("expected ')' but found '") + src_[pos_] + "'", pos_);
        ++pos_;
    }

    Expr parseExpr() {
        Expr lhs = parseTerm();
        while (true) {
            if (accept('+')) lhs = lhs + parseTerm();
            else if (accept('-')) lhs = lhs - parseTerm();
            else return lhs;
        }
    }

    Expr parseTerm() {
        Expr lhs = parseUnary();
        while (true) {
            if (accept('*')) lhs = lhs * parseUnary();
            else if (accept('/')) {
                const Expr rhs = parseUnary();
                if (rhs.isConstant() && rhs.constantValue() == 0.0 && lhs.isConstant())
                    throw ParseError("division by constant zero", pos_);
                lhs = lhs / rhs;
            } else return lhs;
        }
    }

    Expr parseUnary() {
        if (accept('-')) return -parseUnary();
        if (accept('+')) return parseUnary();
        return parsePower();
    }

    Expr parsePower() {
        Expr base = parsePrimary();
        skipSpace();
        if (accept('^')) {
            const std::size_t at = pos_;
            const Expr ex = parseUnary();
            if (!ex.isConstant()) throw ParseError("exponent must be an integer constant", at);
            const double v = ex.constantValue();
            if (v != std::round(v) || std::abs(v) > 1024)
                throw ParseError("exponent must be an integer constant", at);
            return pow(base, static_cast<int>(v));
        }
        return base;
    }

    Expr parsePrimary() {
        skipSpace();
        if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
        const char c = src_[pos_];
        if (c == '(') {
            const std::size_t open = pos_++;
            Expr e = parseExpr();
            expectClose(open);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parseNumber();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parseIdentifier();
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    Expr parseNumber() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
            if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
                pos_ = p;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            }
        }
        const std::string text(src_.substr(start, pos_ - start));
        if (text == ".") throw ParseError("malformed number", start);
        return Expr::constant(std::strtod(text.c_str(), nullptr), arity_);
    }

    Expr parseIdentifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        const std::string name(src_.substr(start, pos_ - start));

        static const std::pair<const char*, Expr (*)(const Expr&)> functions[] = {
            {"sin", [](const Expr& a) { return sin(a); }},
            {"cos", [](const Expr& a) { return cos(a); }},
            {"exp", [](const Expr& a) { return exp(a); }},
            {"ln", [](const Expr& a) { return ln(a); }},
            {"sqrt", [](const Expr& a) { return sqrt(a); }},
            {"sign", [](const Expr& a) { return sign(a); }},
        };
        for (const auto& [fname, fn] : functions) {
            if (name != fname) continue;
            skipSpace();
            if (pos_ >= src_.size() || src_[pos_] != '(')
                throw ParseError("function '" + name + "' must be called as " + name + "(...)", pos_);
            const std::size_t open = pos_++;
            Expr arg = parseExpr();
            expectClose(open);
            return fn(arg);
        }
        if (name == "pi") return Expr::constant(std::numbers::pi, arity_);
        for (int i = 0; i < arity_; ++i)
            if (names_[static_cast<std::size_t>(i)] == name) return Expr::variable(i, arity_);
        for (const char* v : {"t", "x", "y"})
            if (name == v)
                throw ParseError("variable '" + name + "' is not available for arity " + std::to_string(arity_),
                                 start);
        throw ParseError("unknown identifier '" + name + "'", start);
    }

    std::string_view src_;
    const std::vector<std::string>& names_;
    int arity_;
    std::size_t pos_ = 0;
};

}  // namespace

Expr parseExpression(std::string_view source, const std::vector<std::string>& names) {
    if (names.empty() || names.size() > 2) throw PreconditionError("arity must be 1 or 2");
    return Parser(source, names).parse();
}

Expr parseExpression(std::string_view source, int arity) {
    if (arity == 1) return parseExpression(source, std::vector<std::string>{"t"});
    if (arity == 2) return parseExpression(source, std::vector<std::string>{"x", "y"});
    throw PreconditionError("arity must be 1 or 2");
}

}  // namespace perfun
