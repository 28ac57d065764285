#include "medplex/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace medplex {

namespace {

constexpr const char* kFormat = "medplex-checkpoint";

void put_le(std::string& out, double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xffU));
}

double get_le(const unsigned char* p) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(p[b]) << (8 * b);
    return std::bit_cast<double>(bits);
}

} // namespace

void Checkpoint::restore(std::span<const ParamBlock> blocks) const {
    if (blocks.size() != block_names.size()) {
        throw DataError("checkpoint: expected " + std::to_string(blocks.size()) + " blocks, file has " +
                        std::to_string(block_names.size()));
    }
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        if (blocks[b].name != block_names[b] || blocks[b].values.size() != block_values[b].size()) {
            throw DataError("checkpoint: block " + std::to_string(b) + " is '" + block_names[b] + "' with " +
                            std::to_string(block_values[b].size()) + " values, expected '" + blocks[b].name +
                            "' with " + std::to_string(blocks[b].values.size()));
        }
        std::copy(block_values[b].begin(), block_values[b].end(), blocks[b].values.begin());
    }
}

Checkpoint make_checkpoint(std::string kind, nlohmann::json dims, std::uint64_t seed, std::string config_hash,
                           std::span<const ConstParamBlock> blocks) {
    Checkpoint ck{std::move(kind), std::move(dims), seed, std::move(config_hash), {}, {}};
    for (const auto& b : blocks) {
        ck.block_names.push_back(b.name);
        ck.block_values.emplace_back(b.values.begin(), b.values.end());
    }
    return ck;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
    nlohmann::json blocks = nlohmann::json::array();
    std::string blob;
    for (std::size_t b = 0; b < ck.block_names.size(); ++b) {
        blocks.push_back({{"name", ck.block_names[b]}, {"size", ck.block_values[b].size()}});
        for (double v : ck.block_values[b]) put_le(blob, v);
    }
    const nlohmann::json header{{"format", kFormat},
                                {"version", kCheckpointVersion},
                                {"kind", ck.kind},
                                {"dims", ck.dims},
                                {"seed", ck.seed},
                                {"config_hash", ck.config_hash},
                                {"dtype", "float64"},
                                {"byte_order", "little"},
                                {"blocks", blocks}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write checkpoint " + path.string());
    out << header.dump() << '\n';
    out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
    if (!out) throw DataError("failed writing checkpoint " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint " + path.string());
    std::string line;
    std::getline(in, line);
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
        if (header.at("format") != kFormat) throw DataError(path.string() + ": not a checkpoint file");
        if (header.at("version").get<int>() != kCheckpointVersion) {
            throw DataError(path.string() + ": unsupported checkpoint version");
        }
        if (header.at("byte_order") != "little" || header.at("dtype") != "float64") {
            throw DataError(path.string() + ": unsupported checkpoint encoding");
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path.string() + ": bad checkpoint header: " + e.what());
    }
    const std::string blob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    Checkpoint ck;
    ck.kind = header.at("kind").get<std::string>();
    ck.dims = header.at("dims");
    ck.seed = header.at("seed").get<std::uint64_t>();
    ck.config_hash = header.at("config_hash").get<std::string>();
    std::size_t offset = 0;
    const auto* bytes = reinterpret_cast<const unsigned char*>(blob.data());
    for (const auto& b : header.at("blocks")) {
        const auto size = b.at("size").get<std::size_t>();
        if (blob.size() < offset + 8 * size) throw DataError(path.string() + ": checkpoint blob is truncated");
        std::vector<double> values(size);
        for (std::size_t i = 0; i < size; ++i) values[i] = get_le(bytes + offset + 8 * i);
        offset += 8 * size;
        ck.block_names.push_back(b.at("name").get<std::string>());
        ck.block_values.push_back(std::move(values));
    }
    if (offset != blob.size()) throw DataError(path.string() + ": trailing bytes after checkpoint blob");
    return ck;
}

nlohmann::json dims_to_json(const ModelDims& d) {
    return {{"nodes", d.nodes},
            {"features", d.features},
            {"embed_dim", d.embed_dim},
            {"relations", d.relations},
            {"classes", d.classes}};
}

ModelDims dims_from_json(const nlohmann::json& j) {
    try {
        return {j.at("nodes").get<std::size_t>(), j.at("features").get<std::size_t>(),
                j.at("embed_dim").get<std::size_t>(), j.at("relations").get<std::size_t>(),
                j.at("classes").get<std::size_t>()};
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("checkpoint dims: ") + e.what());
    }
}

Checkpoint checkpoint_from_state(const ModelState& state, const std::string& config_hash) {
    const auto blocks = param_blocks(state.params);
    return make_checkpoint("multiplex", dims_to_json(state.dims), state.seed, config_hash, blocks);
}

ModelState state_from_checkpoint(const Checkpoint& ck) {
    if (ck.kind != "multiplex") throw DataError("checkpoint holds a '" + ck.kind + "' model, not the multiplex model");
    ModelState s;
    s.dims = dims_from_json(ck.dims);
    s.seed = ck.seed;
    s.params = Parameters::zeros(s.dims);
    s.grads = Parameters::zeros(s.dims);
    ck.restore(param_blocks(s.params));
    return s;
}

} // namespace medplex
