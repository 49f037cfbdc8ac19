#pragma once

#include <bit>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "cloudcast/seq2seq.hpp"

namespace cloudcast {

// Checkpoint container, all integers little-endian:
//
//   "CCST1"                      5-byte magic
//   u32 version                  currently 1
//   u64 length, bytes            model spec as key=value lines
//   u64 tensor count
//   per tensor: u64 name length, name bytes, u64 rank, u64 dims[rank], f64 data[prod(dims)]

inline constexpr char kCheckpointMagic[] = "CCST1";
inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {

inline void put_u64(std::ostream& os, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 8);
}

inline void put_u32(std::ostream& os, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 4);
}

inline std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw ParseError(0, "checkpoint truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

inline std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw ParseError(0, "checkpoint truncated");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

inline std::string get_bytes(std::istream& is, std::uint64_t n) {
  if (n > (1ull << 32)) throw ParseError(0, "checkpoint field length is implausible");
  std::string s(n, '\0');
  if (n && !is.read(s.data(), static_cast<std::streamsize>(n))) throw ParseError(0, "checkpoint truncated");
  return s;
}

}  // namespace detail

inline std::string serialize_spec(const ModelSpec& s) {
  std::ostringstream os;
  os << "model=" << s.name() << "\nstacks=" << s.stacks << "\nchannels=" << s.channels << "\nk=" << s.k
     << "\ninput_len=" << s.input_len << "\noutput_len=" << s.output_len << "\nembed_k=" << s.embed_k
     << "\nattn_dim=" << s.attn_dim << "\ncoord_loss=" << (s.coord_loss ? 1 : 0)
     << "\ndata_channels=" << s.data_channels << "\nvalue_dim=" << s.value_dim << "\ncoord_dim=" << s.coord_dim
     << "\n";
  return os.str();
}

inline ModelSpec parse_spec(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "malformed spec line '" + line + "'");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto get = [&](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw ParseError(0, "model spec lacks '" + key + "'");
    return it->second;
  };
  auto count = [&](const std::string& key) {
    try {
      return static_cast<std::size_t>(std::stoull(get(key)));
    } catch (const std::logic_error&) {
      throw ParseError(0, "model spec field '" + key + "' is not a count");
    }
  };
  ModelSpec s;
  apply_model_name(s, get("model"));
  s.stacks = count("stacks");
  s.channels = count("channels");
  s.k = count("k");
  s.input_len = count("input_len");
  s.output_len = count("output_len");
  s.embed_k = count("embed_k");
  s.attn_dim = count("attn_dim");
  s.coord_loss = count("coord_loss") != 0;
  s.data_channels = count("data_channels");
  s.value_dim = count("value_dim");
  s.coord_dim = count("coord_dim");
  s.validate();
  return s;
}

inline void save_checkpoint(const Seq2SeqModel& model, std::ostream& os) {
  os.write(kCheckpointMagic, 5);
  detail::put_u32(os, kCheckpointVersion);
  const std::string spec = serialize_spec(model.spec());
  detail::put_u64(os, spec.size());
  os.write(spec.data(), static_cast<std::streamsize>(spec.size()));
  const auto& tensors = model.params().tensors();
  detail::put_u64(os, tensors.size());
  for (const auto& t : tensors) {
    detail::put_u64(os, t.name.size());
    os.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    detail::put_u64(os, t.shape.size());
    for (auto d : t.shape) detail::put_u64(os, d);
    for (double v : t.data) detail::put_u64(os, std::bit_cast<std::uint64_t>(v));
  }
}

inline void save_checkpoint(const Seq2SeqModel& model, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  save_checkpoint(model, os);
  if (!os) throw std::runtime_error("write to '" + path + "' failed");
}

inline Seq2SeqModel load_checkpoint(std::istream& is) {
  char magic[5];
  if (!is.read(magic, 5) || std::string_view(magic, 5) != std::string_view(kCheckpointMagic, 5))
    throw ParseError(0, "not a checkpoint (bad magic)");
  if (const auto v = detail::get_u32(is); v != kCheckpointVersion)
    throw ParseError(0, "unsupported checkpoint version " + std::to_string(v));
  const ModelSpec spec = parse_spec(detail::get_bytes(is, detail::get_u64(is)));
  Seq2SeqModel model = Seq2SeqModel::create(spec, 0);

  ParameterSet loaded = model.params();
  const std::uint64_t count = detail::get_u64(is);
  if (count != loaded.size())
    throw ParseError(0, detail::concat("checkpoint has ", count, " tensors, model ", spec.name(), " needs ",
                                       loaded.size()));
  for (std::size_t id = 0; id < count; ++id) {
    auto& t = loaded[id];
    const std::string name = detail::get_bytes(is, detail::get_u64(is));
    if (name != t.name) throw ParseError(0, "checkpoint tensor '" + name + "' where '" + t.name + "' was expected");
    const std::uint64_t rank = detail::get_u64(is);
    if (rank != t.shape.size()) throw ParseError(0, "tensor '" + name + "' has the wrong rank");
    for (std::size_t d = 0; d < rank; ++d)
      if (detail::get_u64(is) != t.shape[d]) throw ParseError(0, "tensor '" + name + "' has the wrong shape");
    for (double& v : t.data) {
      v = std::bit_cast<double>(detail::get_u64(is));
      if (!std::isfinite(v)) throw ParseError(0, "tensor '" + name + "' holds non-finite values");
    }
  }
  model.set_params(std::move(loaded));
  return model;
}

inline Seq2SeqModel load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  return load_checkpoint(is);
}

}  // namespace cloudcast
