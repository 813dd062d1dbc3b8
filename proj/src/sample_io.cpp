#include "gibbslab/sample_io.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

namespace gibbslab {

namespace {

constexpr char kMagic[4] = {'G', 'L', 'S', 'B'};

template <typename T>
void put(std::ostream& os, T v) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  unsigned char buf[sizeof(T)];
  is.read(reinterpret_cast<char*>(buf), sizeof(T));
  if (!is) throw Error("sample file truncated");
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

}  // namespace

void write_samples(const std::string& path, const SampleFileHeader& header,
                   const std::vector<Configuration>& samples) {
  if (samples.size() != header.reps) throw Error("sample count does not match header");
  std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open '" + tmp + "' for writing");
    os.write(kMagic, 4);
    put<std::uint16_t>(os, header.version);
    put<std::uint16_t>(os, header.dim);
    for (int a = 0; a < 3; ++a) put<std::int32_t>(os, header.lo[a]);
    for (int a = 0; a < 3; ++a) put<std::int32_t>(os, header.hi[a]);
    put<std::uint16_t>(os, static_cast<std::uint16_t>(header.symbols.size()));
    for (int s : header.symbols) put<std::int32_t>(os, s);
    put<std::uint64_t>(os, header.seed);
    put<double>(os, header.t);
    put<std::uint8_t>(os, header.dynamics);
    put<std::uint32_t>(os, header.reps);

    bool packed = header.symbols.size() == 2;
    for (const Configuration& c : samples) {
      int n = c.volume().size();
      if (packed) {
        std::vector<std::uint8_t> bytes(static_cast<std::size_t>((n + 7) / 8), 0);
        for (int i = 0; i < n; ++i)
          if (c.index_at(i)) bytes[static_cast<std::size_t>(i / 8)] |= static_cast<std::uint8_t>(1u << (i % 8));
        os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
      } else {
        for (int i = 0; i < n; ++i) put<std::uint8_t>(os, static_cast<std::uint8_t>(c.index_at(i)));
      }
    }
    if (!os) throw Error("write failed for '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::pair<SampleFileHeader, std::vector<Configuration>> read_samples(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open '" + path + "'");
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) throw Error("'" + path + "' is not a sample file");

  SampleFileHeader h;
  h.version = get<std::uint16_t>(is);
  if (h.version != 1) throw Error("unsupported sample file version " + std::to_string(h.version));
  h.dim = get<std::uint16_t>(is);
  for (int a = 0; a < 3; ++a) h.lo[a] = get<std::int32_t>(is);
  for (int a = 0; a < 3; ++a) h.hi[a] = get<std::int32_t>(is);
  std::uint16_t q = get<std::uint16_t>(is);
  for (int i = 0; i < q; ++i) h.symbols.push_back(get<std::int32_t>(is));
  h.seed = get<std::uint64_t>(is);
  h.t = get<double>(is);
  h.dynamics = get<std::uint8_t>(is);
  h.reps = get<std::uint32_t>(is);

  Volume vol = Volume::rect(h.lo, h.hi, h.dim);
  Alphabet ab(h.symbols);
  bool packed = q == 2;
  int n = vol.size();

  std::vector<Configuration> samples;
  for (std::uint32_t r = 0; r < h.reps; ++r) {
    Configuration c(vol, ab);
    if (packed) {
      std::vector<std::uint8_t> bytes(static_cast<std::size_t>((n + 7) / 8));
      is.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
      if (!is) throw Error("sample file truncated");
      for (int i = 0; i < n; ++i)
        c.set_index_at(i, (bytes[static_cast<std::size_t>(i / 8)] >> (i % 8)) & 1u);
    } else {
      for (int i = 0; i < n; ++i) c.set_index_at(i, get<std::uint8_t>(is));
    }
    samples.push_back(std::move(c));
  }
  return {h, std::move(samples)};
}

}  // namespace gibbslab
