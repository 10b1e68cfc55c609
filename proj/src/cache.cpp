#include "perpress/cache.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

namespace perpress {

namespace {

constexpr const char* kRecordHeader = "record v1";

void fnv1a(std::uint64_t& h, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
}

void hash_coeffs(std::uint64_t& h, std::span<const cplx> cs) {
    const std::uint64_t n = cs.size();
    fnv1a(h, &n, sizeof n);  // length marker
    for (const cplx& c : cs) {
        const double re = c.real(), im = c.imag();
        fnv1a(h, &re, sizeof re);
        fnv1a(h, &im, sizeof im);
    }
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool parse_double_tok(std::istringstream& is, double& out) {
    std::string tok;
    if (!(is >> tok)) return false;
    char* end = nullptr;
    out = std::strtod(tok.c_str(), &end);
    return end == tok.c_str() + tok.size();
}

}  // namespace

std::uint64_t map_fingerprint(const RationalMap& map) {
    std::uint64_t h = 1469598103934665603ull;
    hash_coeffs(h, map.numerator());
    hash_coeffs(h, map.denominator());
    return h;
}

std::string cache_file_path(const std::string& dir, const RationalMap& map,
                            int n) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "map_%016" PRIx64 "_n%02d.ppcache",
                  map_fingerprint(map), n);
    return (std::filesystem::path(dir) / buf).string();
}

void cache_store(const std::string& dir, const RationalMap& map,
                 const PeriodicSet& set) {
    std::filesystem::create_directories(dir);
    const std::string path = cache_file_path(dir, map, set.n);
    std::ofstream out(path, std::ios::app);
    if (!out)
        throw std::runtime_error("cannot open cache file '" + path +
                                 "' for append");
    out << kRecordHeader << " fingerprint " << std::hex
        << map_fingerprint(map) << std::dec << " n " << set.n << " points "
        << set.points.size() << " expected " << set.report.expected
        << " complete " << (set.report.complete ? 1 : 0) << " unresolved "
        << set.report.unresolved_multiplicity << "\n";
    for (const cplx& c : map.numerator())
        out << "coeff num " << fmt17(c.real()) << " " << fmt17(c.imag())
            << "\n";
    for (const cplx& c : map.denominator())
        out << "coeff den " << fmt17(c.real()) << " " << fmt17(c.imag())
            << "\n";
    for (const PeriodicPoint& p : set.points) {
        out << "point " << fmt17(p.z.real()) << " " << fmt17(p.z.imag())
            << " " << fmt17(p.multiplier.real()) << " "
            << fmt17(p.multiplier.imag()) << " " << p.primitive_period << " "
            << fmt17(p.residual) << "\n";
    }
    out << "end-record\n";
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

CacheReadResult cache_load(const std::string& dir, const RationalMap& map,
                           int n) {
    CacheReadResult res;
    const std::string path = cache_file_path(dir, map, n);
    std::ifstream in(path);
    if (!in) return res;

    const std::uint64_t want_fp = map_fingerprint(map);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind(kRecordHeader, 0) != 0) continue;  // seek a header

        std::istringstream hs(line.substr(std::strlen(kRecordHeader)));
        std::string kw;
        std::uint64_t fp = 0;
        long rec_n = -1, count = -1, expected = -1, unresolved = -1;
        int complete = -1;
        bool header_ok = true;
        while (hs >> kw) {
            if (kw == "fingerprint")
                header_ok = static_cast<bool>(hs >> std::hex >> fp >> std::dec);
            else if (kw == "n")
                header_ok = static_cast<bool>(hs >> rec_n);
            else if (kw == "points")
                header_ok = static_cast<bool>(hs >> count);
            else if (kw == "expected")
                header_ok = static_cast<bool>(hs >> expected);
            else if (kw == "complete")
                header_ok = static_cast<bool>(hs >> complete);
            else if (kw == "unresolved")
                header_ok = static_cast<bool>(hs >> unresolved);
            else
                header_ok = false;
            if (!header_ok) break;
        }
        if (!header_ok || rec_n != n || count < 0 || expected < 0 ||
            complete < 0 || unresolved < 0) {
            ++res.skipped_records;
            continue;
        }
        if (fp != want_fp) {
            ++res.foreign_records;
            continue;
        }

        // Coefficient verification lines, then points, then terminator.
        bool ok = true;
        std::vector<cplx> num, den;
        PeriodicSet set;
        set.n = n;
        set.report.expected = expected;
        set.report.complete = complete != 0;
        set.report.unresolved_multiplicity = unresolved;
        long pts_read = 0;
        while (ok && std::getline(in, line)) {
            if (line == "end-record") break;
            std::istringstream ls(line);
            std::string tag;
            ls >> tag;
            if (tag == "coeff") {
                std::string which;
                double re, im;
                if (!(ls >> which) || !parse_double_tok(ls, re) ||
                    !parse_double_tok(ls, im)) {
                    ok = false;
                    break;
                }
                if (which == "num")
                    num.emplace_back(re, im);
                else if (which == "den")
                    den.emplace_back(re, im);
                else {
                    ok = false;
                    break;
                }
            } else if (tag == "point") {
                PeriodicPoint p;
                double re, im, mre, mim, residual;
                long prim;
                if (!parse_double_tok(ls, re) || !parse_double_tok(ls, im) ||
                    !parse_double_tok(ls, mre) ||
                    !parse_double_tok(ls, mim) || !(ls >> prim) ||
                    !parse_double_tok(ls, residual)) {
                    ok = false;
                    break;
                }
                p.z = {re, im};
                p.multiplier = {mre, mim};
                p.n = n;
                p.primitive_period = static_cast<int>(prim);
                p.residual = residual;
                if (is_finite_point(p.multiplier)) {
                    p.log_abs_multiplier = std::log(std::abs(p.multiplier));
                    p.arg_multiplier =
                        std::atan2(p.multiplier.imag(), p.multiplier.real());
                } else {
                    p.log_abs_multiplier =
                        std::numeric_limits<double>::infinity();
                    p.arg_multiplier = 0.0;
                }
                set.points.push_back(p);
                ++pts_read;
            } else {
                ok = false;
                break;
            }
        }
        // The fingerprint matched; the coefficients must too, or the file
        // belongs to a different map (hash collision or hand edit).
        const auto same = [](std::span<const cplx> a,
                             const std::vector<cplx>& b) {
            if (a.size() != b.size()) return false;
            for (std::size_t i = 0; i < a.size(); ++i)
                if (a[i] != b[i]) return false;
            return true;
        };
        const bool coeffs_match =
            same(map.numerator(), num) && same(map.denominator(), den);
        if (ok && line == "end-record" && pts_read == count) {
            if (!coeffs_match) {
                ++res.foreign_records;
                continue;
            }
            set.report.found = static_cast<long>(set.points.size());
            res.set = std::move(set);  // newest intact record wins
            res.salvaged = false;
            continue;
        }
        // Damaged record. When it is the file's final record (an append
        // was cut off) the intact point lines are still trustworthy, so
        // salvage them rather than lose the whole set; an intact record
        // found earlier is still preferred. Mid-file damage is skipped
        // outright.
        ++res.skipped_records;
        const bool at_end =
            !in.good() || in.peek() == std::char_traits<char>::eof();
        if (at_end && coeffs_match && pts_read > 0 &&
            (!res.set || res.salvaged)) {
            set.report.found = pts_read;
            if (pts_read < count) set.report.complete = false;
            res.set = std::move(set);
            res.salvaged = true;
        }
    }
    return res;
}

}  // namespace perpress
