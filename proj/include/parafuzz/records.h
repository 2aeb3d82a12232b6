#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "parafuzz/features.h"
#include "parafuzz/filter.h"
#include "parafuzz/recognizer.h"

namespace parafuzz {

using Json = nlohmann::json;

// One JSON object per line. Doubles are written with round-trip precision.

Json to_json(const FeatureFrame& f);
FeatureFrame frame_from_json(const Json& j);

Json to_json(const ParalinguisticProfile& p);
ParalinguisticProfile profile_from_json(const Json& j);

Json to_json(const ParalinguisticRecord& r);
ParalinguisticRecord record_from_json(const Json& j);

Json to_json(const RecognitionResult& r);
RecognitionResult result_from_json(const Json& j);

Json to_json(const TranscriptEntry& e);

/// {"frame": i, "log_energy": .., "hf_ratio": .., "bands": [8]} per line.
void write_feature_dump(std::ostream& out, const FrameSequence& frames,
                        std::size_t first_index = 0);

std::string to_line(const Json& j);

/// Versioned store document.
Json store_to_json(const TemplateStore& store);
TemplateStore store_from_json(const Json& j);
void save_store(const std::string& path, const TemplateStore& store);
TemplateStore load_store(const std::string& path);

}  // namespace parafuzz
