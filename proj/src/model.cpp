#include "advrec/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace advrec {

namespace {

constexpr char kMagic[8] = {'A', 'R', 'C', 'K', 'P', 'T', '0', '1'};

void put32(std::string& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>(v >> (8 * k)));
}

void put64(std::string& out, std::uint64_t v) {
  for (int k = 0; k < 8; ++k) out.push_back(static_cast<char>(v >> (8 * k)));
}

struct Reader {
  const std::string& bytes;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (pos + n > bytes.size()) throw IoError("truncated checkpoint");
  }
  std::uint32_t get32() {
    need(4);
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[pos++]))
           << (8 * k);
    return v;
  }
  std::uint64_t get64() {
    need(8);
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[pos++]))
           << (8 * k);
    return v;
  }
};

}  // namespace

void ModelState::init_gaussian(RngStream rng, double stddev) {
  for (auto& v : user_factors) v = rng.next_gaussian() * stddev;
  for (auto& v : item_factors) v = rng.next_gaussian() * stddev;
}

void ModelState::check_finite(const std::string& context) const {
  for (double v : user_factors)
    if (!std::isfinite(v))
      throw TrainError("non-finite user embedding (" + context + ")");
  for (double v : item_factors)
    if (!std::isfinite(v))
      throw TrainError("non-finite item embedding (" + context + ")");
}

std::string checkpoint_bytes(const ModelState& state, std::uint64_t seed,
                             std::uint32_t epoch) {
  std::string out;
  out.reserve(sizeof(kMagic) + 24 +
              8 * (state.user_factors.size() + state.item_factors.size()));
  out.append(kMagic, sizeof(kMagic));
  put32(out, state.n_users);
  put32(out, state.n_items);
  put32(out, state.d);
  put64(out, seed);
  put32(out, epoch);
  auto put_doubles = [&](const std::vector<double>& v) {
    for (double x : v) {
      std::uint64_t bits;
      std::memcpy(&bits, &x, sizeof(bits));
      put64(out, bits);
    }
  };
  put_doubles(state.user_factors);
  put_doubles(state.item_factors);
  return out;
}

CheckpointInfo checkpoint_from_bytes(ModelState& state, const std::string& bytes) {
  if (bytes.size() < sizeof(kMagic) ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
    throw IoError("not a checkpoint");
  Reader reader{bytes, sizeof(kMagic)};
  const auto n_users = reader.get32();
  const auto n_items = reader.get32();
  const auto d = reader.get32();
  const auto seed = reader.get64();
  const auto epoch = reader.get32();
  state = ModelState(n_users, n_items, d);
  auto get_doubles = [&](std::vector<double>& v) {
    for (double& x : v) {
      const std::uint64_t bits = reader.get64();
      std::memcpy(&x, &bits, sizeof(x));
    }
  };
  get_doubles(state.user_factors);
  get_doubles(state.item_factors);
  return {seed, epoch};
}

void save_checkpoint(const ModelState& state, std::uint64_t seed,
                     std::uint32_t epoch, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  const auto bytes = checkpoint_bytes(state, seed, epoch);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path);
}

CheckpointInfo load_checkpoint(ModelState& state, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return checkpoint_from_bytes(state, buf.str());
}

}  // namespace advrec
