#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

namespace waveglue {

enum class FaceKind { interior, interface, boundary };

struct Face {
  int v0 = -1, v1 = -1;        // vertex indices
  int owner = -1;              // triangle owning the face
  int owner_edge = -1;         // local edge index in the owner (0:01, 1:12, 2:20)
  int neighbor = -1;           // second triangle for interior faces, else -1
  int neighbor_edge = -1;
  FaceKind kind = FaceKind::interior;
};

/// Conforming triangulation with classified faces. Interface faces lie on the
/// configured horizontal line y = y_gamma.
struct TriMesh {
  Eigen::MatrixXd vertices;            // N x 2
  Eigen::MatrixXi triangles;           // M x 3, counter-clockwise
  std::vector<Face> faces;
  std::vector<double> h_K;             // per-triangle diameter
  double y_gamma = 0.0;
  bool has_interface = false;

  int n_vertices() const { return static_cast<int>(vertices.rows()); }
  int n_triangles() const { return static_cast<int>(triangles.rows()); }
  std::vector<int> interface_faces() const;  // sorted by x
  double max_shape_ratio() const;            // max h_K / inradius
};

/// Parse the node/element text format: node file "N 2" then "index x y";
/// element file "M 3" then "index v1 v2 v3" (1-based). Orientation is fixed
/// up silently; nonconforming edges and duplicate vertices are errors.
TriMesh load_mesh(const std::string& node_text, const std::string& ele_text, double y_gamma,
                  double tol);
TriMesh load_mesh_files(const std::string& node_path, const std::string& ele_path, double y_gamma,
                        double tol);
void save_mesh_files(const TriMesh& mesh, const std::string& node_path,
                     const std::string& ele_path);

enum class InterfaceConfig { every_point, every_third };

struct Rect {
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
};

/// Uniform right-triangle mesh of the rectangle whose top edge (y = y1) is the
/// interface; n_fd is the FD grid point count the interface vertices match.
/// every_point: one interface vertex per FD point; every_third: every third.
TriMesh structured_interface_mesh(int n_fd, InterfaceConfig config, const Rect& domain, int ny);

/// Classify (or re-classify) faces against the line y = y_gamma.
void classify_faces(TriMesh& mesh, double y_gamma, double tol);

}  // namespace waveglue
