#include "waveglue/mesh2d.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace waveglue {

namespace {

double signed_area(const Eigen::MatrixXd& V, int a, int b, int c) {
  const double ax = V(a, 0), ay = V(a, 1);
  return 0.5 * ((V(b, 0) - ax) * (V(c, 1) - ay) - (V(c, 0) - ax) * (V(b, 1) - ay));
}

void build_faces_and_metrics(TriMesh& mesh) {
  const int M = mesh.n_triangles();
  mesh.h_K.assign(M, 0.0);
  std::map<std::pair<int, int>, int> edge_to_face;
  mesh.faces.clear();
  for (int t = 0; t < M; ++t) {
    std::array<int, 3> v = {mesh.triangles(t, 0), mesh.triangles(t, 1), mesh.triangles(t, 2)};
    for (int e = 0; e < 3; ++e) {
      const int a = v[e], b = v[(e + 1) % 3];
      const double len = (mesh.vertices.row(a) - mesh.vertices.row(b)).norm();
      mesh.h_K[t] = std::max(mesh.h_K[t], len);
      const auto key = std::minmax(a, b);
      auto it = edge_to_face.find(key);
      if (it == edge_to_face.end()) {
        Face f;
        f.v0 = a;
        f.v1 = b;
        f.owner = t;
        f.owner_edge = e;
        edge_to_face[key] = static_cast<int>(mesh.faces.size());
        mesh.faces.push_back(f);
      } else {
        Face& f = mesh.faces[static_cast<size_t>(it->second)];
        if (f.neighbor != -1) {
          std::ostringstream os;
          os << "load_mesh: nonconforming edge shared by three triangles near ("
             << mesh.vertices(a, 0) << ", " << mesh.vertices(a, 1) << ")";
          throw std::runtime_error(os.str());
        }
        f.neighbor = t;
        f.neighbor_edge = e;
      }
    }
  }
}

}  // namespace

void classify_faces(TriMesh& mesh, double y_gamma, double tol) {
  mesh.y_gamma = y_gamma;
  mesh.has_interface = false;
  for (Face& f : mesh.faces) {
    if (f.neighbor != -1) {
      f.kind = FaceKind::interior;
      continue;
    }
    const bool on_line = std::abs(mesh.vertices(f.v0, 1) - y_gamma) <= tol &&
                         std::abs(mesh.vertices(f.v1, 1) - y_gamma) <= tol;
    f.kind = on_line ? FaceKind::interface : FaceKind::boundary;
    if (on_line) mesh.has_interface = true;
  }
}

std::vector<int> TriMesh::interface_faces() const {
  std::vector<int> idx;
  for (size_t i = 0; i < faces.size(); ++i)
    if (faces[i].kind == FaceKind::interface) idx.push_back(static_cast<int>(i));
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    const double xa = std::min(vertices(faces[static_cast<size_t>(a)].v0, 0),
                               vertices(faces[static_cast<size_t>(a)].v1, 0));
    const double xb = std::min(vertices(faces[static_cast<size_t>(b)].v0, 0),
                               vertices(faces[static_cast<size_t>(b)].v1, 0));
    return xa < xb;
  });
  return idx;
}

double TriMesh::max_shape_ratio() const {
  double worst = 0.0;
  for (int t = 0; t < n_triangles(); ++t) {
    const int a = triangles(t, 0), b = triangles(t, 1), c = triangles(t, 2);
    const double la = (vertices.row(b) - vertices.row(c)).norm();
    const double lb = (vertices.row(a) - vertices.row(c)).norm();
    const double lc = (vertices.row(a) - vertices.row(b)).norm();
    const double s = 0.5 * (la + lb + lc);
    const double area = std::abs(signed_area(vertices, a, b, c));
    const double inradius = area / s;
    worst = std::max(worst, h_K[static_cast<size_t>(t)] / inradius);
  }
  return worst;
}

TriMesh load_mesh(const std::string& node_text, const std::string& ele_text, double y_gamma,
                  double tol) {
  TriMesh mesh;
  {
    std::istringstream is(node_text);
    int n = 0, dim = 0;
    if (!(is >> n >> dim) || dim != 2) throw std::runtime_error("load_mesh: bad node header");
    mesh.vertices.resize(n, 2);
    for (int i = 0; i < n; ++i) {
      int idx;
      double x, y;
      if (!(is >> idx >> x >> y)) throw std::runtime_error("load_mesh: truncated node file");
      if (idx < 1 || idx > n) throw std::runtime_error("load_mesh: node index out of range");
      mesh.vertices(idx - 1, 0) = x;
      mesh.vertices(idx - 1, 1) = y;
    }
  }
  // duplicate vertex check on a rounded grid
  {
    std::map<std::pair<long long, long long>, int> seen;
    const double q = tol > 0 ? tol : 1e-12;
    for (int i = 0; i < mesh.n_vertices(); ++i) {
      const auto key = std::make_pair(static_cast<long long>(std::llround(mesh.vertices(i, 0) / q)),
                                      static_cast<long long>(std::llround(mesh.vertices(i, 1) / q)));
      auto it = seen.find(key);
      if (it != seen.end()) {
        std::ostringstream os;
        os << "load_mesh: duplicate vertex near (" << mesh.vertices(i, 0) << ", "
           << mesh.vertices(i, 1) << ")";
        throw std::runtime_error(os.str());
      }
      seen[key] = i;
    }
  }
  {
    std::istringstream is(ele_text);
    int m = 0, k = 0;
    if (!(is >> m >> k) || k != 3) throw std::runtime_error("load_mesh: bad element header");
    mesh.triangles.resize(m, 3);
    for (int i = 0; i < m; ++i) {
      int idx, a, b, c;
      if (!(is >> idx >> a >> b >> c)) throw std::runtime_error("load_mesh: truncated element file");
      mesh.triangles(idx - 1, 0) = a - 1;
      mesh.triangles(idx - 1, 1) = b - 1;
      mesh.triangles(idx - 1, 2) = c - 1;
    }
  }
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const double sa = signed_area(mesh.vertices, mesh.triangles(t, 0), mesh.triangles(t, 1),
                                  mesh.triangles(t, 2));
    if (sa == 0.0) throw std::runtime_error("load_mesh: degenerate triangle");
    if (sa < 0.0) std::swap(mesh.triangles(t, 1), mesh.triangles(t, 2));
  }
  build_faces_and_metrics(mesh);
  classify_faces(mesh, y_gamma, tol);
  return mesh;
}

TriMesh load_mesh_files(const std::string& node_path, const std::string& ele_path, double y_gamma,
                        double tol) {
  auto slurp = [](const std::string& p) {
    std::ifstream f(p);
    if (!f) throw std::runtime_error("cannot open: " + p);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
  };
  return load_mesh(slurp(node_path), slurp(ele_path), y_gamma, tol);
}

void save_mesh_files(const TriMesh& mesh, const std::string& node_path,
                     const std::string& ele_path) {
  std::ofstream nf(node_path);
  if (!nf) throw std::runtime_error("cannot open for writing: " + node_path);
  nf.precision(17);
  nf << mesh.n_vertices() << " 2\n";
  for (int i = 0; i < mesh.n_vertices(); ++i)
    nf << (i + 1) << ' ' << mesh.vertices(i, 0) << ' ' << mesh.vertices(i, 1) << '\n';
  std::ofstream ef(ele_path);
  if (!ef) throw std::runtime_error("cannot open for writing: " + ele_path);
  ef << mesh.n_triangles() << " 3\n";
  for (int t = 0; t < mesh.n_triangles(); ++t)
    ef << (t + 1) << ' ' << (mesh.triangles(t, 0) + 1) << ' ' << (mesh.triangles(t, 1) + 1) << ' '
       << (mesh.triangles(t, 2) + 1) << '\n';
}

TriMesh structured_interface_mesh(int n_fd, InterfaceConfig config, const Rect& domain, int ny) {
  int vx = 0;
  if (config == InterfaceConfig::every_point) {
    vx = n_fd;
  } else {
    if ((n_fd - 1) % 3 != 0)
      throw std::invalid_argument(
          "structured_interface_mesh: every_third needs n_fd - 1 divisible by 3");
    vx = (n_fd - 1) / 3 + 1;
  }
  if (vx < 2 || ny < 2) throw std::invalid_argument("structured_interface_mesh: grid too small");
  TriMesh mesh;
  mesh.vertices.resize(vx * ny, 2);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < vx; ++i) {
      mesh.vertices(j * vx + i, 0) =
          domain.x0 + (domain.x1 - domain.x0) * static_cast<double>(i) / (vx - 1);
      mesh.vertices(j * vx + i, 1) =
          domain.y0 + (domain.y1 - domain.y0) * static_cast<double>(j) / (ny - 1);
    }
  mesh.triangles.resize(2 * (vx - 1) * (ny - 1), 3);
  int t = 0;
  for (int j = 0; j < ny - 1; ++j)
    for (int i = 0; i < vx - 1; ++i) {
      const int a = j * vx + i, b = a + 1, c = a + vx, d = c + 1;
      mesh.triangles.row(t++) << a, b, d;
      mesh.triangles.row(t++) << a, d, c;
    }
  build_faces_and_metrics(mesh);
  const double tol = 1e-12 * std::max(std::abs(domain.x1 - domain.x0),
                                      std::abs(domain.y1 - domain.y0));
  classify_faces(mesh, domain.y1, tol);
  return mesh;
}

}  // namespace waveglue
