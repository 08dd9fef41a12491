#include "sw/simplify.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <vector>

#include "sw/errors.hpp"

namespace sw {

namespace {

using Quadric = Eigen::Matrix4d;

Quadric plane_quadric(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                      const Eigen::Vector3d& c) {
    Eigen::Vector3d n = (b - a).cross(c - a);
    double len = n.norm();
    if (len <= 0.0) return Quadric::Zero();
    n /= len;
    Eigen::Vector4d plane(n.x(), n.y(), n.z(), -n.dot(a));
    // Weight by face area so quadrics track surface measure.
    return 0.5 * len * plane * plane.transpose();
}

double quadric_cost(const Quadric& q, const Eigen::Vector3d& p) {
    Eigen::Vector4d h(p.x(), p.y(), p.z(), 1.0);
    return h.dot(q * h);
}

struct Candidate {
    double cost;
    int a, b;            // collapse b into a
    Eigen::Vector3d pos;
    long stamp_a, stamp_b;
    bool operator>(const Candidate& o) const {
        if (cost != o.cost) return cost > o.cost;
        if (a != o.a) return a > o.a;
        return b > o.b;
    }
};

struct Working {
    std::vector<Eigen::Vector3d> pos;
    std::vector<Quadric> quadric;
    std::vector<long> stamp;               // bumped on every change around a vertex
    std::vector<std::array<int, 3>> faces;
    std::vector<char> face_alive;
    std::vector<std::vector<int>> vfaces;  // vertex -> incident face ids
    std::vector<char> alive;
    Eigen::Vector3d bbox_lo, bbox_hi;

    bool face_has(int fi, int v) const {
        const auto& f = faces[fi];
        return f[0] == v || f[1] == v || f[2] == v;
    }
};

std::vector<int> neighbors(const Working& w, int v) {
    std::vector<int> out;
    for (int fi : w.vfaces[v]) {
        if (!w.face_alive[fi]) continue;
        for (int u : w.faces[fi]) {
            if (u != v) out.push_back(u);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Standard link condition: an interior edge may collapse only when the
// endpoint neighborhoods share exactly the two opposite vertices (one for
// a boundary edge).
bool link_ok(const Working& w, int a, int b) {
    auto na = neighbors(w, a);
    auto nb = neighbors(w, b);
    std::vector<int> common;
    std::set_intersection(na.begin(), na.end(), nb.begin(), nb.end(),
                          std::back_inserter(common));
    int shared_faces = 0;
    for (int fi : w.vfaces[a]) {
        if (w.face_alive[fi] && w.face_has(fi, b)) ++shared_faces;
    }
    return static_cast<int>(common.size()) == shared_faces && shared_faces >= 1 &&
           shared_faces <= 2;
}

bool in_bbox(const Working& w, const Eigen::Vector3d& p) {
    const double eps = 1e-12 * (w.bbox_hi - w.bbox_lo).norm();
    return (p.array() >= w.bbox_lo.array() - eps).all() &&
           (p.array() <= w.bbox_hi.array() + eps).all();
}

// Would moving both endpoints of (a,b) to `p` flip or squash any surviving
// incident face?
bool placement_ok(const Working& w, int a, int b, const Eigen::Vector3d& p) {
    for (int v : {a, b}) {
        for (int fi : w.vfaces[v]) {
            if (!w.face_alive[fi]) continue;
            if (w.face_has(fi, a) && w.face_has(fi, b)) continue;  // face dies
            Eigen::Vector3d q[3];
            for (int k = 0; k < 3; ++k) {
                int u = w.faces[fi][k];
                q[k] = (u == a || u == b) ? p : w.pos[u];
            }
            Eigen::Vector3d n_new = (q[1] - q[0]).cross(q[2] - q[0]);
            Eigen::Vector3d r[3];
            for (int k = 0; k < 3; ++k) r[k] = w.pos[w.faces[fi][k]];
            Eigen::Vector3d n_old = (r[1] - r[0]).cross(r[2] - r[0]);
            double n_old_len = n_old.norm();
            if (n_new.dot(n_old) <= 1e-10 * n_old_len * n_new.norm() ||
                n_new.norm() <= 1e-14 * n_old_len) {
                return false;
            }
        }
    }
    return true;
}

Candidate make_candidate(const Working& w, int a, int b) {
    Quadric q = w.quadric[a] + w.quadric[b];
    Eigen::Matrix3d A = q.topLeftCorner<3, 3>();
    Eigen::Vector3d rhs = -q.block<3, 1>(0, 3);

    std::vector<Eigen::Vector3d> options;
    Eigen::FullPivLU<Eigen::Matrix3d> lu(A);
    lu.setThreshold(1e-9);
    if (lu.isInvertible()) options.push_back(lu.solve(rhs));
    options.push_back(0.5 * (w.pos[a] + w.pos[b]));
    options.push_back(w.pos[a]);
    options.push_back(w.pos[b]);

    Candidate cand;
    cand.a = a;
    cand.b = b;
    cand.stamp_a = w.stamp[a];
    cand.stamp_b = w.stamp[b];
    cand.cost = std::numeric_limits<double>::infinity();
    for (const auto& p : options) {
        if (!p.allFinite() || !in_bbox(w, p)) continue;
        double c = quadric_cost(q, p);
        if (c < cand.cost) {
            cand.cost = c;
            cand.pos = p;
        }
    }
    return cand;
}

}  // namespace

SimplifyResult simplify(const TriangleMesh& mesh, int target_vertices) {
    const int nv = mesh.vertex_count();
    if (target_vertices < 4) {
        throw ArgumentError("simplify: target_vertices must be at least 4");
    }
    if (target_vertices > nv) {
        throw ArgumentError("simplify: target_vertices exceeds mesh vertex count");
    }
    if (target_vertices == nv) return {mesh, true};

    Working w;
    w.pos = mesh.vertices;
    w.faces = mesh.faces;
    w.face_alive.assign(mesh.faces.size(), 1);
    w.alive.assign(nv, 1);
    w.stamp.assign(nv, 0);
    w.quadric.assign(nv, Quadric::Zero());
    w.vfaces.assign(nv, {});
    w.bbox_lo = w.bbox_hi = mesh.vertices.empty() ? Eigen::Vector3d::Zero() : mesh.vertices[0];
    for (const auto& v : mesh.vertices) {
        w.bbox_lo = w.bbox_lo.cwiseMin(v);
        w.bbox_hi = w.bbox_hi.cwiseMax(v);
    }

    for (size_t fi = 0; fi < mesh.faces.size(); ++fi) {
        const auto& f = mesh.faces[fi];
        Quadric kq = plane_quadric(w.pos[f[0]], w.pos[f[1]], w.pos[f[2]]);
        for (int k = 0; k < 3; ++k) {
            w.quadric[f[k]] += kq;
            w.vfaces[f[k]].push_back(static_cast<int>(fi));
        }
    }

    // Boundary edges get a perpendicular constraint plane so open rims stay
    // put during collapse.
    {
        std::map<std::pair<int, int>, std::pair<int, int>> edge_info;  // edge -> (count, face)
        for (size_t fi = 0; fi < mesh.faces.size(); ++fi) {
            const auto& f = mesh.faces[fi];
            for (int k = 0; k < 3; ++k) {
                int a = std::min(f[k], f[(k + 1) % 3]);
                int b = std::max(f[k], f[(k + 1) % 3]);
                auto& info = edge_info[{a, b}];
                ++info.first;
                info.second = static_cast<int>(fi);
            }
        }
        for (const auto& [e, info] : edge_info) {
            if (info.first != 1) continue;
            const auto& f = mesh.faces[info.second];
            Eigen::Vector3d fn =
                (w.pos[f[1]] - w.pos[f[0]]).cross(w.pos[f[2]] - w.pos[f[0]]);
            Eigen::Vector3d ev = w.pos[e.second] - w.pos[e.first];
            Eigen::Vector3d n = ev.cross(fn);
            double len = n.norm();
            if (len <= 0.0) continue;
            n /= len;
            Eigen::Vector4d plane(n.x(), n.y(), n.z(), -n.dot(w.pos[e.first]));
            Quadric bq = ev.squaredNorm() * plane * plane.transpose();
            w.quadric[e.first] += bq;
            w.quadric[e.second] += bq;
        }
    }

    std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> pq;
    auto push_edges_of = [&](int v) {
        for (int u : neighbors(w, v)) {
            int a = std::min(v, u), b = std::max(v, u);
            Candidate c = make_candidate(w, a, b);
            if (std::isfinite(c.cost)) pq.push(c);
        }
    };
    {
        std::set<std::pair<int, int>> seen;
        for (const auto& f : mesh.faces) {
            for (int k = 0; k < 3; ++k) {
                int a = std::min(f[k], f[(k + 1) % 3]);
                int b = std::max(f[k], f[(k + 1) % 3]);
                if (a != b && seen.insert({a, b}).second) {
                    Candidate c = make_candidate(w, a, b);
                    if (std::isfinite(c.cost)) pq.push(c);
                }
            }
        }
    }

    int alive_count = nv;
    while (alive_count > target_vertices && !pq.empty()) {
        Candidate c = pq.top();
        pq.pop();
        if (!w.alive[c.a] || !w.alive[c.b]) continue;
        if (c.stamp_a != w.stamp[c.a] || c.stamp_b != w.stamp[c.b]) continue;
        if (!link_ok(w, c.a, c.b)) continue;
        if (!placement_ok(w, c.a, c.b, c.pos)) continue;

        // Collapse b into a.
        w.pos[c.a] = c.pos;
        w.quadric[c.a] += w.quadric[c.b];
        w.alive[c.b] = 0;
        for (int fi : w.vfaces[c.b]) {
            if (!w.face_alive[fi]) continue;
            if (w.face_has(fi, c.a)) {
                w.face_alive[fi] = 0;
                continue;
            }
            for (int& u : w.faces[fi]) {
                if (u == c.b) u = c.a;
            }
            w.vfaces[c.a].push_back(fi);
        }
        w.vfaces[c.b].clear();
        ++w.stamp[c.a];
        for (int u : neighbors(w, c.a)) ++w.stamp[u];
        --alive_count;
        push_edges_of(c.a);
    }

    SimplifyResult result;
    result.reached_target = alive_count <= target_vertices;
    std::vector<int> remap(nv, -1);
    int next = 0;
    for (int v = 0; v < nv; ++v) {
        if (w.alive[v]) remap[v] = next++;
    }
    result.mesh.vertices.reserve(next);
    for (int v = 0; v < nv; ++v) {
        if (w.alive[v]) result.mesh.vertices.push_back(w.pos[v]);
    }
    for (size_t fi = 0; fi < w.faces.size(); ++fi) {
        if (!w.face_alive[fi]) continue;
        const auto& f = w.faces[fi];
        if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) continue;
        result.mesh.faces.push_back({remap[f[0]], remap[f[1]], remap[f[2]]});
    }
    return result;
}

}  // namespace sw
