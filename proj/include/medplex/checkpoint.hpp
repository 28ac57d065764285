#ifndef MEDPLEX_CHECKPOINT_HPP
#define MEDPLEX_CHECKPOINT_HPP

#include "medplex/model.hpp"

#include <json.hpp>

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace medplex {

/// On disk: one line of JSON header, then the parameter blocks as little-endian float64
/// in header order. The header lists every block's name and element count.
struct Checkpoint {
    std::string kind;
    nlohmann::json dims;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::vector<std::string> block_names;
    std::vector<std::vector<double>> block_values;

    /// Copies the stored values into `blocks`, which must match by name and size.
    void restore(std::span<const ParamBlock> blocks) const;
};

inline constexpr int kCheckpointVersion = 1;

Checkpoint make_checkpoint(std::string kind, nlohmann::json dims, std::uint64_t seed, std::string config_hash,
                           std::span<const ConstParamBlock> blocks);

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ck);
Checkpoint read_checkpoint(const std::filesystem::path& path);

nlohmann::json dims_to_json(const ModelDims& d);
ModelDims dims_from_json(const nlohmann::json& j);

Checkpoint checkpoint_from_state(const ModelState& state, const std::string& config_hash);
ModelState state_from_checkpoint(const Checkpoint& ck);

} // namespace medplex

#endif // MEDPLEX_CHECKPOINT_HPP
