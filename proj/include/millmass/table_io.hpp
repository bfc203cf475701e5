#pragma once

#include "millmass/mass_model.hpp"
#include "millmass/oracle.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace millmass {

using Provenance = std::vector<std::pair<std::string, std::string>>;

// Lookup table CSV. Provenance pairs and the density are written as leading
// "# key=value" lines; a t_s column is appended when every row has a time.
void write_lookup_csv(std::ostream& out, const LookupTable& table, const Provenance& provenance = {});
// Reads a table written by write_lookup_csv. The density comment is required.
LookupTable read_lookup_csv(std::istream& in);

// Per-step removal: n,Vr_mm3,crx,cry,crz (centroid cells empty when Vr = 0).
void write_removal_csv(std::ostream& out, const std::vector<RemovalRecord>& records);

std::string oracle_to_json(const OracleResult& r, const Provenance& provenance = {});
OracleResult oracle_from_json(const std::string& text);

std::string report_to_json(const CompareReport& rep);
// Fixed-width table with columns quantity, model, reference, relative error.
void write_report_table(std::ostream& out, const CompareReport& rep);

} // namespace millmass
