#pragma once

#include "seqscreen/propositions.hpp"
#include "seqscreen/regularity.hpp"
#include "seqscreen/spec_file.hpp"

#include <json.hpp>

#include <string>

namespace seqscreen {

using Json = nlohmann::ordered_json;

// Reports keep a fixed key order and carry no timestamps, so identical
// inputs serialize to identical bytes. Non-finite numbers become null.

Json to_json(const GridSpec& g);
Json to_json(const ToleranceConfig& t);
Json to_json(const GridProvenance& p);
Json to_json(const Witness& w);
Json to_json(const CheckReport& r, std::size_t max_witnesses = 50);
Json to_json(const RegularityReport& r, std::size_t max_witnesses = 50);
Json to_json(const PropositionReport& r);
/// Echo of the [signal]/[kernel] sections as written in the spec file.
Json model_echo(const SpecDocument& doc);

/// Pretty-printed with a trailing newline.
std::string dump(const Json& j);

}  // namespace seqscreen
