#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "sl2dyn/cayley.hpp"
#include "sl2dyn/dynamics.hpp"
#include "sl2dyn/spectra.hpp"
#include "sl2dyn/words.hpp"

namespace sl2dyn {

// Reports keep insertion order so identical runs emit identical bytes.
using Json = nlohmann::ordered_json;

// Shortest round-trip decimal form (std::to_chars); "nan" for NaN.
std::string format_double(double v);

Json to_json(const SpectralReport& r);
Json to_json(const GenerationReport& r);
Json to_json(const FreenessReport& r);
Json to_json(const TransitivityReport& r);
Json to_json(const DefectReport& r);

// Exact column set, one row per scanned prime, trailing newline.
// Header: p,class_mod4,group_size,generated,lambda2,gap,method,flag
std::string to_csv(const std::vector<ScanRow>& rows);

// Writes to the path, or to stdout when the path is empty. Content goes out
// exactly as given (UTF-8, caller supplies the trailing newline).
void emit_report(const std::string& content, const std::string& path);

}  // namespace sl2dyn
