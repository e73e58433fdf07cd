#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "drifting/generator.hpp"
#include "drifting/io.hpp"

namespace drifting {

namespace {
constexpr const char* kMagic = "drifting-checkpoint 1";
}

std::string checkpoint_to_string(const GeneratorParams& params) {
    std::string out = kMagic;
    out += "\nlayers " + std::to_string(params.n_layers) + "\ntensors " + std::to_string(params.tensors.size()) + "\n";
    for (const auto& t : params.tensors) {
        out += "tensor " + t.name + " " + std::to_string(t.rows) + " " + std::to_string(t.cols) + "\n";
        for (std::size_t r = 0; r < t.rows; ++r) {
            for (std::size_t c = 0; c < t.cols; ++c) {
                if (c) out += ' ';
                out += format_double(t.at(r, c));
            }
            out += '\n';
        }
    }
    return out;
}

GeneratorParams checkpoint_from_string(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kMagic) throw std::runtime_error("checkpoint: bad header");
    GeneratorParams p;
    std::string word;
    std::size_t count = 0;
    if (!(in >> word >> p.n_layers) || word != "layers") throw std::runtime_error("checkpoint: missing layer count");
    if (!(in >> word >> count) || word != "tensors") throw std::runtime_error("checkpoint: missing tensor count");
    for (std::size_t t = 0; t < count; ++t) {
        Tensor ten;
        if (!(in >> word >> ten.name >> ten.rows >> ten.cols) || word != "tensor") {
            throw std::runtime_error("checkpoint: malformed tensor header " + std::to_string(t));
        }
        ten.data.resize(ten.rows * ten.cols);
        for (double& v : ten.data) {
            std::string tok;
            if (!(in >> tok)) throw std::runtime_error("checkpoint: truncated tensor " + ten.name);
            const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
                throw std::runtime_error("checkpoint: bad value '" + tok + "' in " + ten.name);
            }
        }
        if (ten.name == "class_embed") p.class_index = p.tensors.size();
        if (ten.name == "style_embed") p.style_index = p.tensors.size();
        p.tensors.push_back(std::move(ten));
    }
    if (p.tensors.size() < 2 * p.n_layers) throw std::runtime_error("checkpoint: missing layer tensors");
    return p;
}

void write_checkpoint(const std::string& path, const GeneratorParams& params) {
    write_file_atomic(path, checkpoint_to_string(params));
}

GeneratorParams read_checkpoint(const std::string& path) {
    return checkpoint_from_string(read_file(path));
}

}  // namespace drifting
