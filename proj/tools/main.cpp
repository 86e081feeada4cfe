#include <iostream>

#include "app.hpp"

int main(int argc, char** argv) { return perfun::cli::runApp(argc, argv, std::cout, std::cerr); }
