#include "sw/mesh.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>
#include <utility>

#include "sw/errors.hpp"

namespace sw {

namespace {

bool parse_double(std::string_view tok, double& out) {
    const char* begin = tok.data();
    const char* end = begin + tok.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

// Leading integer of an OBJ face token ("7", "7/1", "7//3", "-2/5").
bool parse_face_index(std::string_view tok, long& out) {
    size_t slash = tok.find('/');
    std::string_view head = slash == std::string_view::npos ? tok : tok.substr(0, slash);
    const char* begin = head.data();
    const char* end = begin + head.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> toks;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) toks.push_back(line.substr(i, j - i));
        i = j;
    }
    return toks;
}

[[noreturn]] void parse_fail(int line_no, const std::string& what) {
    throw ParseError("OBJ parse error at line " + std::to_string(line_no) + ": " + what);
}

struct UndirectedEdge {
    int a, b;
    UndirectedEdge(int u, int v) : a(std::min(u, v)), b(std::max(u, v)) {}
    bool operator<(const UndirectedEdge& o) const { return a < o.a || (a == o.a && b < o.b); }
};

double face_area(const TriangleMesh& m, const std::array<int, 3>& f) {
    const Eigen::Vector3d e1 = m.vertices[f[1]] - m.vertices[f[0]];
    const Eigen::Vector3d e2 = m.vertices[f[2]] - m.vertices[f[0]];
    return 0.5 * e1.cross(e2).norm();
}

struct DisjointSet {
    std::vector<int> parent;
    explicit DisjointSet(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

// Dijkstra from `src`; returns (farthest vertex, its distance). Distances
// vector is reused across calls by the caller.
std::pair<int, double> dijkstra_farthest(const std::vector<std::vector<std::pair<int, double>>>& adj,
                                         int src, std::vector<double>& dist) {
    const double inf = std::numeric_limits<double>::infinity();
    std::fill(dist.begin(), dist.end(), inf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[src] = 0.0;
    pq.emplace(0.0, src);
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[u]) continue;
        for (auto [v, w] : adj[u]) {
            double nd = d + w;
            if (nd < dist[v]) {
                dist[v] = nd;
                pq.emplace(nd, v);
            }
        }
    }
    int far = src;
    double best = 0.0;
    for (int v = 0; v < static_cast<int>(dist.size()); ++v) {
        if (dist[v] != inf && dist[v] > best) {
            best = dist[v];
            far = v;
        }
    }
    return {far, best};
}

}  // namespace

TriangleMesh load_obj(std::istream& in) {
    TriangleMesh mesh;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto toks = split_ws(line);
        if (toks.empty() || toks[0][0] == '#') continue;
        if (toks[0] == "v") {
            if (toks.size() < 4) parse_fail(line_no, "vertex needs 3 coordinates");
            Eigen::Vector3d p;
            for (int k = 0; k < 3; ++k) {
                if (!parse_double(toks[1 + k], p[k])) {
                    parse_fail(line_no, "bad vertex coordinate '" + std::string(toks[1 + k]) + "'");
                }
            }
            mesh.vertices.push_back(p);
        } else if (toks[0] == "f") {
            if (toks.size() < 4) parse_fail(line_no, "face needs at least 3 vertices");
            std::vector<int> poly;
            poly.reserve(toks.size() - 1);
            const long defined = static_cast<long>(mesh.vertices.size());
            for (size_t k = 1; k < toks.size(); ++k) {
                long idx;
                if (!parse_face_index(toks[k], idx) || idx == 0) {
                    parse_fail(line_no, "bad face index '" + std::string(toks[k]) + "'");
                }
                long resolved = idx > 0 ? idx - 1 : defined + idx;
                if (resolved < 0) {
                    throw StructuralError("OBJ line " + std::to_string(line_no) +
                                          ": face index " + std::to_string(idx) +
                                          " out of range");
                }
                poly.push_back(static_cast<int>(resolved));
            }
            for (size_t k = 2; k < poly.size(); ++k) {
                mesh.faces.push_back({poly[0], poly[k - 1], poly[k]});
            }
        }
        // vn / vt / g / o / s / usemtl / mtllib are intentionally skipped
    }
    const int nv = mesh.vertex_count();
    for (const auto& f : mesh.faces) {
        for (int idx : f) {
            if (idx >= nv) {
                throw StructuralError("OBJ face index " + std::to_string(idx + 1) +
                                      " out of range (mesh has " + std::to_string(nv) +
                                      " vertices)");
            }
        }
    }
    return mesh;
}

TriangleMesh load_obj_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open OBJ file: " + path);
    return load_obj(in);
}

void save_obj(const TriangleMesh& mesh, std::ostream& out) {
    char buf[128];
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", v.x(), v.y(), v.z());
        out << buf;
    }
    for (const auto& f : mesh.faces) {
        out << 'f' << ' ' << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
    }
}

void save_obj_file(const TriangleMesh& mesh, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write OBJ file: " + path);
    save_obj(mesh, out);
}

double bbox_diagonal(const TriangleMesh& mesh) {
    if (mesh.vertices.empty()) return 0.0;
    Eigen::Vector3d lo = mesh.vertices.front(), hi = mesh.vertices.front();
    for (const auto& v : mesh.vertices) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    return (hi - lo).norm();
}

MeshReport validate(const TriangleMesh& mesh) {
    MeshReport rep;
    rep.vertex_count = mesh.vertex_count();
    rep.face_count = mesh.face_count();
    const int nv = rep.vertex_count;
    for (const auto& f : mesh.faces) {
        for (int idx : f) {
            if (idx < 0 || idx >= nv) {
                throw StructuralError("face index " + std::to_string(idx) + " out of range");
            }
        }
    }

    const double diag2 = bbox_diagonal(mesh) * bbox_diagonal(mesh);
    const double area_floor = 1e-12 * diag2;
    std::map<UndirectedEdge, int> edge_faces;
    DisjointSet ds(nv);
    for (const auto& f : mesh.faces) {
        bool repeated = f[0] == f[1] || f[1] == f[2] || f[0] == f[2];
        if (repeated || face_area(mesh, f) < area_floor) ++rep.degenerate_face_count;
        for (int k = 0; k < 3; ++k) {
            int a = f[k], b = f[(k + 1) % 3];
            if (a == b) continue;
            ++edge_faces[UndirectedEdge(a, b)];
            ds.unite(a, b);
        }
    }

    rep.is_watertight = !mesh.faces.empty();
    for (const auto& [e, cnt] : edge_faces) {
        if (cnt != 2) {
            rep.is_watertight = false;
            break;
        }
    }

    if (nv > 0) {
        std::vector<char> seen(nv, 0);
        int comps = 0;
        for (int v = 0; v < nv; ++v) {
            int root = ds.find(v);
            if (!seen[root]) {
                seen[root] = 1;
                ++comps;
            }
        }
        rep.component_count = comps;
    }
    return rep;
}

std::string MeshReport::to_json() const {
    std::ostringstream os;
    os << "{\"vertex_count\":" << vertex_count << ",\"face_count\":" << face_count
       << ",\"is_watertight\":" << (is_watertight ? "true" : "false")
       << ",\"component_count\":" << component_count
       << ",\"degenerate_face_count\":" << degenerate_face_count << "}";
    return os.str();
}

VolumeResult volume(const TriangleMesh& mesh) {
    double signed_vol = 0.0;
    for (const auto& f : mesh.faces) {
        const Eigen::Vector3d& a = mesh.vertices[f[0]];
        const Eigen::Vector3d& b = mesh.vertices[f[1]];
        const Eigen::Vector3d& c = mesh.vertices[f[2]];
        signed_vol += a.dot(b.cross(c)) / 6.0;
    }
    VolumeResult res;
    res.value = std::abs(signed_vol);
    res.watertight = validate(mesh).is_watertight;
    return res;
}

double geodesic_diameter(const TriangleMesh& mesh) {
    const int nv = mesh.vertex_count();
    if (nv == 0) throw StructuralError("geodesic diameter of empty mesh");

    std::map<UndirectedEdge, double> edges;
    for (const auto& f : mesh.faces) {
        for (int k = 0; k < 3; ++k) {
            int a = f[k], b = f[(k + 1) % 3];
            if (a == b) continue;
            edges.emplace(UndirectedEdge(a, b),
                          (mesh.vertices[a] - mesh.vertices[b]).norm());
        }
    }
    std::vector<std::vector<std::pair<int, double>>> adj(nv);
    for (const auto& [e, len] : edges) {
        adj[e.a].emplace_back(e.b, len);
        adj[e.b].emplace_back(e.a, len);
    }

    std::vector<double> dist(nv);
    // Sweep 0 doubles as the connectivity check.
    auto [far0, d0] = dijkstra_farthest(adj, 0, dist);
    for (double d : dist) {
        if (d == std::numeric_limits<double>::infinity()) {
            throw StructuralError("geodesic diameter of disconnected mesh");
        }
    }

    double best = d0;
    int src = far0;
    const int max_sweeps = 64;
    for (int sweep = 1; sweep < max_sweeps; ++sweep) {
        auto [far, d] = dijkstra_farthest(adj, src, dist);
        if (d > best) {
            best = d;
            src = far;
        } else if (sweep >= 2) {
            break;
        } else {
            src = far;
        }
    }
    return best;
}

std::uint64_t content_hash(const TriangleMesh& mesh) {
    std::uint64_t h = 1469598103934665603ull;  // FNV offset basis
    auto mix = [&h](const void* data, size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (size_t i = 0; i < n; ++i) {
            h ^= p[i];
            h *= 1099511628211ull;  // FNV prime
        }
    };
    std::uint64_t nv = mesh.vertices.size(), nf = mesh.faces.size();
    mix(&nv, sizeof nv);
    mix(&nf, sizeof nf);
    for (const auto& v : mesh.vertices) {
        double c[3] = {v.x(), v.y(), v.z()};
        mix(c, sizeof c);
    }
    for (const auto& f : mesh.faces) {
        std::int64_t idx[3] = {f[0], f[1], f[2]};
        mix(idx, sizeof idx);
    }
    return h;
}

}  // namespace sw
