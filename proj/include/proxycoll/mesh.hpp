#pragma once

#include <array>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "proxycoll/math.hpp"

namespace proxycoll {

struct TriangleMesh {
    std::vector<Vector3d> vertices;
    std::vector<std::array<int, 3>> faces;

    void validate() const {
        if (vertices.size() < 3) throw std::invalid_argument("mesh: fewer than 3 vertices");
        for (const Vector3d& v : vertices)
            if (!finite(v)) throw std::invalid_argument("mesh: non-finite vertex");
        for (const auto& f : faces)
            for (int idx : f)
                if (idx < 0 || idx >= int(vertices.size()))
                    throw std::invalid_argument("mesh: face index out of range");
    }

    std::pair<Vector3d, Vector3d> bounds() const {
        Vector3d lo = vertices.front(), hi = vertices.front();
        for (const Vector3d& v : vertices) {
            lo = lo.cwiseMin(v);
            hi = hi.cwiseMax(v);
        }
        return {lo, hi};
    }

    // Every edge shared by exactly two faces.
    bool is_watertight() const {
        std::map<std::pair<int, int>, int> edge_count;
        for (const auto& f : faces) {
            for (int e = 0; e < 3; ++e) {
                int a = f[e], b = f[(e + 1) % 3];
                if (a > b) std::swap(a, b);
                ++edge_count[{a, b}];
            }
        }
        for (const auto& [edge, count] : edge_count)
            if (count != 2) return false;
        return !faces.empty();
    }
};

// Minimal Wavefront OBJ reader: `v` and `f` records, triangles only.
inline TriangleMesh load_obj(std::istream& in) {
    TriangleMesh mesh;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "v") {
            Vector3d v;
            if (!(ls >> v.x() >> v.y() >> v.z()))
                throw std::invalid_argument("obj: malformed vertex record");
            mesh.vertices.push_back(v);
        } else if (tag == "f") {
            std::vector<int> idx;
            std::string tok;
            while (ls >> tok) {
                // accept v, v/t, v/t/n, v//n forms
                const size_t slash = tok.find('/');
                const int v = std::stoi(slash == std::string::npos ? tok : tok.substr(0, slash));
                if (v == 0) throw std::invalid_argument("obj: zero face index");
                idx.push_back(v > 0 ? v - 1 : int(mesh.vertices.size()) + v);
            }
            if (idx.size() != 3)
                throw std::invalid_argument("obj: only triangulated faces are accepted");
            mesh.faces.push_back({idx[0], idx[1], idx[2]});
        }
    }
    mesh.validate();
    return mesh;
}

inline TriangleMesh load_obj_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("obj: cannot open " + path);
    return load_obj(in);
}

inline void save_obj(const TriangleMesh& mesh, std::ostream& out) {
    for (const Vector3d& v : mesh.vertices)
        out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
    for (const auto& f : mesh.faces)
        out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

enum class ContainmentMethod { winding, parity };

namespace detail {

// Signed solid angle of triangle (a,b,c) seen from the origin.
inline double solid_angle(const Vector3d& a, const Vector3d& b, const Vector3d& c) {
    const double la = a.norm(), lb = b.norm(), lc = c.norm();
    const double det = a.dot(b.cross(c));
    const double denom = la * lb * lc + a.dot(b) * lc + b.dot(c) * la + c.dot(a) * lb;
    return 2.0 * std::atan2(det, denom);
}

// Moller-Trumbore; returns true on a clean hit with t > 0, sets degenerate
// when the ray grazes an edge/vertex or runs parallel to the face plane.
inline bool ray_triangle(const Vector3d& origin, const Vector3d& dir, const Vector3d& v0,
                         const Vector3d& v1, const Vector3d& v2, bool* degenerate) {
    constexpr double eps = 1e-12;
    const Vector3d e1 = v1 - v0, e2 = v2 - v0;
    const Vector3d pvec = dir.cross(e2);
    const double det = e1.dot(pvec);
    if (std::abs(det) < eps) return false;
    const double inv = 1.0 / det;
    const Vector3d tvec = origin - v0;
    const double u = tvec.dot(pvec) * inv;
    if (u < -eps || u > 1.0 + eps) return false;
    const Vector3d qvec = tvec.cross(e1);
    const double v = dir.dot(qvec) * inv;
    if (v < -eps || u + v > 1.0 + eps) return false;
    const double t = e2.dot(qvec) * inv;
    if (t <= eps) return false;
    if (u < eps || v < eps || u + v > 1.0 - eps) *degenerate = true;
    return true;
}

}  // namespace detail

// Point-in-mesh test for watertight meshes. The winding-number form sums
// solid angles (robust, no rays); the parity form casts a ray and retries
// with a different direction whenever it grazes an edge.
inline bool mesh_contains(const TriangleMesh& mesh, const Vector3d& p,
                          ContainmentMethod method = ContainmentMethod::winding) {
    if (!mesh.is_watertight()) throw std::invalid_argument("mesh_contains: open mesh");
    if (method == ContainmentMethod::winding) {
        double total = 0.0;
        for (const auto& f : mesh.faces)
            total += detail::solid_angle(mesh.vertices[f[0]] - p, mesh.vertices[f[1]] - p,
                                         mesh.vertices[f[2]] - p);
        return std::abs(total) > 2.0 * M_PI;
    }
    static const std::array<Vector3d, 5> directions = {
        Vector3d(0.577350269189626, 0.577350269189626, 0.577350269189626),
        Vector3d(0.855362784514624, -0.466532753349385, 0.225553902022718),
        Vector3d(-0.239186649949339, 0.852967227286096, 0.463972563514347),
        Vector3d(0.414514024275691, 0.270986213442586, -0.868752072760754),
        Vector3d(-0.668740304976422, -0.540892470092312, 0.510194671522752)};
    for (const Vector3d& dir : directions) {
        bool degenerate = false;
        int crossings = 0;
        for (const auto& f : mesh.faces) {
            if (detail::ray_triangle(p, dir, mesh.vertices[f[0]], mesh.vertices[f[1]],
                                     mesh.vertices[f[2]], &degenerate))
                ++crossings;
            if (degenerate) break;
        }
        if (!degenerate) return (crossings % 2) == 1;
    }
    // Every probe direction grazed an edge; fall back to the winding form.
    return mesh_contains(mesh, p, ContainmentMethod::winding);
}

}  // namespace proxycoll
