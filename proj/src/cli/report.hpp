#pragma once

// JSON and CSV renderings of profiles, critical orbits and certificates.

#include <ostream>
#include <string>

#include "json.hpp"
#include "perfun/analysis.hpp"
#include "perfun/catalog.hpp"

namespace perfun::cli {

// %.12g
std::string csvNumber(double v);

void writeProfileCsv(std::ostream& out, const DerivativeProfile& p);
nlohmann::json profileJson(const DerivativeProfile& p, bool withOrbits);
nlohmann::json criticalJson(const CriticalOrbitReport& r);
nlohmann::json certificateJson(const Certificate& c);
nlohmann::json catalogEntryJson(const CatalogEntry& e);

// at most maxPoints evenly spaced samples, always keeping the last one
nlohmann::json orbitJson(const std::vector<CycleSample>& samples, std::size_t maxPoints = 256);

const char* verdictName(Verdict v);

}  // namespace perfun::cli
