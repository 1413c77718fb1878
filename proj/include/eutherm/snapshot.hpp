#pragma once

#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>

#include "eutherm/fields.hpp"

namespace eutherm {

// Field snapshots: a 64-byte ASCII header followed by flat little-endian
// 64-bit float arrays, fields in canonical order p, Fe, alpha, beta, w with
// each component contiguous.
//
//   GEN1 d=<d> n=<n> len=<len> t=<time> f=p,Fe,a,b,w
//
// The header is padded with spaces to exactly 64 bytes.

inline void write_snapshot(const std::string& path, const QFields& q, double time) {
  char header[65];
  std::snprintf(header, sizeof(header), "GEN1 d=%d n=%d len=%.9g t=%.9e f=p,Fe,a,b,w",
                q.grid.dim(), q.grid.n(), q.grid.length(), time);
  size_t len = std::strlen(header);
  for (size_t i = len; i < 64; ++i) header[i] = ' ';

  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("snapshot: cannot open " + path + " for writing");
  out.write(header, 64);
  for (const Field* f : q.components())
    out.write(reinterpret_cast<const char*>(f->data()),
              static_cast<std::streamsize>(f->size() * sizeof(double)));
  if (!out) throw ParseError("snapshot: short write to " + path);
}

struct SnapshotInfo {
  int d = 0, n = 0;
  double length = 0, time = 0;
};

inline SnapshotInfo read_snapshot(const std::string& path, QFields& q) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("snapshot: cannot open " + path);
  char header[65] = {0};
  in.read(header, 64);
  if (!in) throw ParseError("snapshot: truncated header in " + path);
  SnapshotInfo info;
  if (std::sscanf(header, "GEN1 d=%d n=%d len=%lf t=%lf", &info.d, &info.n, &info.length,
                  &info.time) != 4)
    throw ParseError("snapshot: bad header in " + path);
  Grid g(info.d, info.n, info.length);
  q = QFields(g);
  for (Field* f : q.components()) {
    in.read(reinterpret_cast<char*>(f->data()),
            static_cast<std::streamsize>(f->size() * sizeof(double)));
    if (!in) throw ParseError("snapshot: truncated data in " + path);
  }
  return info;
}

// 1-D slice of a scalar field as CSV (x, value); for 2-D grids the slice is
// the row iy = 0.
inline void write_slice_csv(const std::string& path, const Grid& g, const Field& f,
                            const std::string& name) {
  std::ofstream out(path);
  if (!out) throw ParseError("slice: cannot open " + path);
  out << "x," << name << "\n";
  char buf[64];
  for (int ix = 0; ix < g.n(); ++ix) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", g.x_of(ix), f[g.index(ix, 0)]);
    out << buf;
  }
}

}  // namespace eutherm
