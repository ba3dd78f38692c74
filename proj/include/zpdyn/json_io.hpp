#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "zpdyn/criteria.hpp"
#include "zpdyn/func.hpp"
#include "zpdyn/oracle.hpp"

// Wire formats. A function is JSON with common fields
//   {"p": <prime>, "depth": <K>, "repr": "expr"|"table"|"vdp"|"gform"|"cyclic", ...}
// and per-repr payload:
//   expr:   "expr": "<grammar string>"
//   table:  "tables": [[digit]]        (tables[k] has p^(k+1) entries)
//   vdp:    "B": ["d0,d1,... (base p)"] (p^depth+1... see README) coefficients
//   gform:  "phi0": [images], "g": <function JSON or expression string>
//   cyclic: "phi0": [images], "g": [[images] per level], "n": [[exponents] per level]
// Verdicts serialize as
//   {"kind", "certified_depth", "levels": [{"k", "status", "witness"?}], ...}.

namespace zpdyn::io {

nlohmann::json fn_to_json(const CompatibleFn& f);
CompatibleFn fn_from_json(const nlohmann::json& j);

nlohmann::json verdict_to_json(const criteria::Verdict& v);
std::string verdict_to_text(const criteria::Verdict& v);

nlohmann::json cross_to_json(const oracle::CrossReport& r);

} // namespace zpdyn::io
