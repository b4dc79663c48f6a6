#include "dnspec/field.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "dnspec/parallel.hpp"

namespace dnspec {

namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// In-place 1D DFT with sign -1 (forward, unscaled). Iterative radix-2 for
// power-of-two lengths, direct evaluation otherwise. Both are sequential and
// bit-deterministic.
void dft_line(cdouble* x, int N, int stride, bool inverse, std::vector<cdouble>& scratch) {
  const double sign = inverse ? +1.0 : -1.0;
  if (is_pow2(N)) {
    // gather
    scratch.resize(N);
    for (int i = 0; i < N; ++i) scratch[i] = x[i * stride];
    // bit reversal
    for (int i = 1, j = 0; i < N; ++i) {
      int bit = N >> 1;
      for (; j & bit; bit >>= 1) j ^= bit;
      j ^= bit;
      if (i < j) std::swap(scratch[i], scratch[j]);
    }
    for (int len = 2; len <= N; len <<= 1) {
      const double ang = sign * 2.0 * M_PI / len;
      const cdouble wl(std::cos(ang), std::sin(ang));
      for (int i = 0; i < N; i += len) {
        cdouble w(1.0, 0.0);
        for (int k = 0; k < len / 2; ++k) {
          const cdouble u = scratch[i + k];
          const cdouble v = scratch[i + k + len / 2] * w;
          scratch[i + k] = u + v;
          scratch[i + k + len / 2] = u - v;
          w *= wl;
        }
      }
    }
    for (int i = 0; i < N; ++i) x[i * stride] = scratch[i];
    return;
  }
  scratch.assign(N, cdouble(0.0, 0.0));
  for (int k = 0; k < N; ++k) {
    cdouble acc(0.0, 0.0);
    for (int j = 0; j < N; ++j) {
      const double ang = sign * 2.0 * M_PI * ((long long)j * k % N) / N;
      acc += x[j * stride] * cdouble(std::cos(ang), std::sin(ang));
    }
    scratch[k] = acc;
  }
  for (int i = 0; i < N; ++i) x[i * stride] = scratch[i];
}

// Applies the 1D transform along every axis of the n-dim array.
void dft_nd(std::vector<cdouble>& data, const Grid& g, bool inverse) {
  const int n = g.dim(), N = g.modes_per_axis();
  const std::size_t total = g.size();
  std::vector<cdouble> scratch;
  for (int ax = 0; ax < n; ++ax) {
    // stride of the axis in row-major layout
    std::size_t stride = 1;
    for (int a = ax + 1; a < n; ++a) stride *= N;
    const std::size_t lines = total / N;
    for (std::size_t line = 0; line < lines; ++line) {
      // decompose line index into the non-axis coordinates
      const std::size_t outer = line / stride;
      const std::size_t inner = line % stride;
      const std::size_t base = outer * stride * N + inner;
      dft_line(data.data() + base, N, static_cast<int>(stride), inverse, scratch);
    }
  }
}

}  // namespace

SpectralField::SpectralField(Grid g, std::vector<cdouble> coeffs)
    : grid_(g), c_(std::move(coeffs)) {
  if (c_.size() != grid_.size())
    throw std::invalid_argument("SpectralField: coefficient count does not match grid");
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  if (grid_ != o.grid_) throw std::invalid_argument("SpectralField: grid mismatch");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  if (grid_ != o.grid_) throw std::invalid_argument("SpectralField: grid mismatch");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(cdouble a) {
  for (auto& v : c_) v *= a;
  return *this;
}

double SpectralField::parseval_l2() const {
  const double s = chunked_reduce(
      c_.size(), 0.0,
      [&](std::size_t b, std::size_t e) {
        double acc = 0;
        for (std::size_t i = b; i < e; ++i) acc += std::norm(c_[i]);
        return acc;
      },
      [](double a, double b) { return a + b; });
  return std::sqrt(s);
}

SpectralField transform(const Grid& g, std::span<const cdouble> samples) {
  if (samples.size() != g.size())
    throw std::invalid_argument("transform: sample count does not match grid");
  std::vector<cdouble> data(samples.begin(), samples.end());
  dft_nd(data, g, /*inverse=*/false);
  const double scale = 1.0 / static_cast<double>(g.size());
  for (auto& v : data) v *= scale;
  return SpectralField(g, std::move(data));
}

std::vector<cdouble> inverse_transform(const SpectralField& f) {
  std::vector<cdouble> data(f.coeffs().begin(), f.coeffs().end());
  dft_nd(data, f.grid(), /*inverse=*/true);
  return data;
}

SpectralField pointwise_product(const SpectralField& a, const SpectralField& b) {
  if (a.grid() != b.grid()) throw std::invalid_argument("pointwise_product: grid mismatch");
  const Grid& g = a.grid();
  const Grid g2(g.dim(), 2 * g.modes_per_axis());
  // embed both spectra into the doubled lattice
  auto embed = [&](const SpectralField& f) {
    SpectralField out(g2);
    for (std::size_t i = 0; i < f.size(); ++i)
      out.at_mode(g.mode_at(i)) = f[i];
    return out;
  };
  const auto sa = inverse_transform(embed(a));
  const auto sb = inverse_transform(embed(b));
  std::vector<cdouble> prod(sa.size());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = sa[i] * sb[i];
  return transform(g2, prod);
}

VectorField& VectorField::operator+=(const VectorField& o) {
  if (p() != o.p()) throw std::invalid_argument("VectorField: size mismatch");
  for (int k = 0; k < p(); ++k) comp[k] += o.comp[k];
  return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
  if (p() != o.p()) throw std::invalid_argument("VectorField: size mismatch");
  for (int k = 0; k < p(); ++k) comp[k] -= o.comp[k];
  return *this;
}

VectorField& VectorField::operator*=(cdouble a) {
  for (auto& f : comp) f *= a;
  return *this;
}

namespace {

// splitmix64; fully pinned bit-level generator so seeded runs are
// reproducible across platforms and thread counts.
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform01() {  // in (0,1]
    return (static_cast<double>(next() >> 11) + 1.0) * 0x1p-53;
  }
  cdouble gaussian_pair() {  // standard complex Gaussian via Box-Muller
    const double u1 = uniform01(), u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return cdouble(r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2));
  }
};

}  // namespace

std::uint64_t hash_mix(std::uint64_t seed, std::uint64_t salt) {
  Rng r(seed ^ (salt * 0xd1342543de82ef95ull + 0x2545f4914f6cdd1dull));
  return r.next();
}

cdouble seeded_gaussian(std::uint64_t key) {
  Rng r(key);
  return r.gaussian_pair();
}

SpectralField random_field(const Grid& g, std::uint64_t seed, double envelope) {
  SpectralField f(g);
  Rng rng(hash_mix(seed, 0x5fe1));
  for (std::size_t i = 0; i < f.size(); ++i)
    f[i] = rng.gaussian_pair() * std::pow(g.bracket(i), -envelope);
  return f;
}

SpectralField random_field(const Grid& g, std::uint64_t seed) {
  return random_field(g, seed, 0.5 * (g.dim() + 1));
}

VectorField random_vector_field(const Grid& g, int p, std::uint64_t seed, double envelope) {
  VectorField v(g, p);
  for (int k = 0; k < p; ++k)
    v[k] = random_field(g, hash_mix(seed, 0xc0ffee + static_cast<std::uint64_t>(k)), envelope);
  return v;
}

VectorField random_vector_field(const Grid& g, int p, std::uint64_t seed) {
  return random_vector_field(g, p, seed, 0.5 * (g.dim() + 1));
}

void write_field(const std::string& path, const VectorField& f) {
  const Grid& g = f.grid();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_field: cannot open " + path);
  const std::uint32_t header[3] = {static_cast<std::uint32_t>(g.dim()),
                                   static_cast<std::uint32_t>(g.modes_per_axis()),
                                   static_cast<std::uint32_t>(f.p())};
  os.write(reinterpret_cast<const char*>(header), sizeof(header));
  for (int k = 0; k < f.p(); ++k) {
    const auto c = f[k].coeffs();
    os.write(reinterpret_cast<const char*>(c.data()),
             static_cast<std::streamsize>(c.size() * sizeof(cdouble)));
  }
  if (!os) throw std::runtime_error("write_field: write failed for " + path);

  nlohmann::ordered_json manifest;
  manifest["n"] = g.dim();
  manifest["N"] = g.modes_per_axis();
  manifest["p"] = f.p();
  manifest["dtype"] = "complex128";
  manifest["layout"] = "component-major, row-major lattice, FFT mode order";
  std::ofstream ms(path + ".json");
  ms << manifest.dump(2) << "\n";
}

VectorField read_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_field: cannot open " + path);
  std::uint32_t header[3];
  is.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!is) throw std::runtime_error("read_field: truncated header in " + path);
  const Grid g(static_cast<int>(header[0]), static_cast<int>(header[1]));
  const int p = static_cast<int>(header[2]);
  if (p < 1) throw std::runtime_error("read_field: invalid component count");
  VectorField f(g, p);
  for (int k = 0; k < p; ++k) {
    auto c = f[k].coeffs();
    is.read(reinterpret_cast<char*>(c.data()),
            static_cast<std::streamsize>(c.size() * sizeof(cdouble)));
    if (!is) throw std::runtime_error("read_field: truncated data in " + path);
  }
  return f;
}

}  // namespace dnspec
