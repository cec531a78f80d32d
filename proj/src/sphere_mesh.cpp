#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "alexcmp/error.hpp"
#include "alexcmp/metricspace.hpp"

namespace alexcmp {

namespace {

using Face = std::array<std::uint32_t, 3>;

struct IcoMesh {
  std::vector<Vec3> vertices;  // unit length
  std::vector<Face> faces;
};

IcoMesh icosahedron() {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  IcoMesh m;
  m.vertices = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : m.vertices) v = normalized(v);
  m.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
             {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
             {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  return m;
}

IcoMesh subdivide(const IcoMesh& in) {
  IcoMesh out;
  out.vertices = in.vertices;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoint;
  auto mid = [&](std::uint32_t a, std::uint32_t b) {
    const auto key = std::minmax(a, b);
    const auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const auto idx = static_cast<std::uint32_t>(out.vertices.size());
    out.vertices.push_back(normalized(out.vertices[a] + out.vertices[b]));
    midpoint.emplace(key, idx);
    return idx;
  };
  for (const Face& f : in.faces) {
    const auto ab = mid(f[0], f[1]);
    const auto bc = mid(f[1], f[2]);
    const auto ca = mid(f[2], f[0]);
    out.faces.push_back({f[0], ab, ca});
    out.faces.push_back({f[1], bc, ab});
    out.faces.push_back({f[2], ca, bc});
    out.faces.push_back({ab, bc, ca});
  }
  return out;
}

double arc(const Vec3& a, const Vec3& b) { return std::atan2(norm(cross(a, b)), dot(a, b)); }

}  // namespace

SpacePtr make_sphere_mesh(double radius, int level, int ring) {
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "sphere radius must be positive");
  if (level < 0 || level > 7) throw Error(ErrorKind::InvalidArgument, "mesh level must be in [0, 7]");
  if (ring < 1 || ring > 4) throw Error(ErrorKind::InvalidArgument, "mesh ring must be in [1, 4]");

  IcoMesh mesh = icosahedron();
  for (int i = 0; i < level; ++i) mesh = subdivide(mesh);
  const std::size_t n = mesh.vertices.size();

  std::vector<std::vector<std::uint32_t>> neighbors(n);
  for (const Face& f : mesh.faces) {
    for (int i = 0; i < 3; ++i) {
      const auto a = f[i], b = f[(i + 1) % 3];
      if (a < b) {
        neighbors[a].push_back(b);
        neighbors[b].push_back(a);
      }
    }
  }

  GraphInput in;
  in.points.reserve(n);
  for (std::size_t v = 0; v < n; ++v) {
    in.points.push_back({std::to_string(v), {}, radius * mesh.vertices[v]});
  }
  double mesh_edge_sum = 0.0;
  std::size_t mesh_edges = 0;
  for (std::uint32_t v = 0; v < n; ++v) {
    for (const auto u : neighbors[v]) {
      if (u > v) {
        mesh_edge_sum += radius * arc(mesh.vertices[v], mesh.vertices[u]);
        ++mesh_edges;
      }
    }
  }
  // Breadth-first rings: join v to every vertex within `ring` mesh edges.
  std::vector<int> hops(n, -1);
  for (std::uint32_t v = 0; v < n; ++v) {
    std::vector<std::uint32_t> frontier{v}, touched{v};
    hops[v] = 0;
    for (int h = 1; h <= ring; ++h) {
      std::vector<std::uint32_t> next;
      for (const auto u : frontier) {
        for (const auto w : neighbors[u]) {
          if (hops[w] < 0) {
            hops[w] = h;
            next.push_back(w);
            touched.push_back(w);
          }
        }
      }
      frontier = std::move(next);
    }
    for (const auto u : touched) {
      if (u > v) {
        in.edges.push_back({in.points[v].id, in.points[u].id,
                            radius * arc(mesh.vertices[v], mesh.vertices[u])});
      }
      hops[u] = -1;
    }
  }
  in.resolution = mesh_edge_sum / static_cast<double>(mesh_edges);
  return make_graph_space(in, BackendKind::SphereMesh,
                          {{"R", radius}, {"mesh", level}, {"ring", ring}});
}

}  // namespace alexcmp
