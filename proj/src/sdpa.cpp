// SDPA sparse (.dat-s) reader and writer.
//
// The file describes the SDPA pair
//     min c'x  s.t.  sum_i F_i x_i - F_0 >= 0,   max <F_0, Y>  s.t.  <F_i, Y> = c_i, Y >= 0,
// and SdpProblem is stored as the second of these: c = b, F_i = A_i, F_0 = -C.

#include <cstdio>
#include <fstream>
#include <sstream>

#include "zb/conic.hpp"
#include "zb/error.hpp"

namespace zb {

namespace {

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string format_sdpa(const SdpProblem& p)
{
    p.validate();
    std::ostringstream os;
    os << p.num_constraints() << '\n';
    os << p.blocks.size() << '\n';
    for (std::size_t k = 0; k < p.blocks.size(); ++k) {
        if (k) os << ' ';
        os << (p.blocks[k].kind == ConeKind::nonneg ? -p.blocks[k].size : p.blocks[k].size);
    }
    os << '\n';
    for (int i = 0; i < p.num_constraints(); ++i) {
        if (i) os << ' ';
        os << fmt(p.b[i]);
    }
    os << '\n';
    auto emit = [&](int matno, const Entry& e, double v) {
        os << matno << ' ' << e.block + 1 << ' ' << e.row + 1 << ' ' << e.col + 1 << ' ' << fmt(v) << '\n';
    };
    for (const auto& e : p.objective) emit(0, e, -e.value);
    for (int i = 0; i < p.num_constraints(); ++i)
        for (const auto& e : p.constraints[static_cast<std::size_t>(i)]) emit(i + 1, e, e.value);
    return os.str();
}

void export_sdpa(const SdpProblem& p, const std::string& path)
{
    const std::string text = format_sdpa(p);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

SdpProblem parse_sdpa_text(const std::string& text)
{
    // Strip comment lines and the punctuation SDPA tolerates in headers.
    std::istringstream lines(text);
    std::string line, body;
    while (std::getline(lines, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '"' || line[first] == '*') continue;
        for (char& ch : line)
            if (ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')') ch = ' ';
        body += line;
        body += '\n';
    }
    std::istringstream in(body);
    auto fail = [](const std::string& what) { return InvalidInput("sdpa parse: " + what); };

    // Header lines may carry trailing annotations such as "=mDIM"; take the
    // leading numeric tokens of each line.
    std::vector<std::string> header_lines;
    std::string hl;
    for (int k = 0; k < 2 && std::getline(in, hl); ++k) header_lines.push_back(hl);
    if (header_lines.size() < 2) throw fail("missing header");
    auto leading_long = [&](const std::string& s, const char* what) {
        std::istringstream ls(s);
        long v = 0;
        if (!(ls >> v)) throw fail(what);
        return v;
    };
    const long m = leading_long(header_lines[0], "bad constraint count");
    const long nblocks = leading_long(header_lines[1], "bad block count");
    if (m < 0 || nblocks < 0) throw fail("negative header value");

    SdpProblem p;
    while (static_cast<long>(p.blocks.size()) < nblocks) {
        if (!std::getline(in, hl)) throw fail("missing block structure");
        std::istringstream ls(hl);
        long s = 0;
        while (static_cast<long>(p.blocks.size()) < nblocks && ls >> s) {
            if (s == 0) throw fail("zero block size");
            p.blocks.push_back({static_cast<int>(s < 0 ? -s : s), s < 0 ? ConeKind::nonneg : ConeKind::psd});
        }
    }
    p.b.resize(m);
    long filled = 0;
    while (filled < m) {
        if (!std::getline(in, hl)) throw fail("objective vector too short");
        std::istringstream ls(hl);
        std::string tok;
        while (filled < m && ls >> tok) {
            try {
                p.b[filled] = std::stod(tok);
            } catch (const std::exception&) {
                break;
            }
            ++filled;
        }
    }
    p.constraints.resize(static_cast<std::size_t>(m));
    long matno = 0, blk = 0, r = 0, c = 0;
    std::string vtok;
    while (in >> matno >> blk >> r >> c >> vtok) {
        if (matno < 0 || matno > m) throw fail("matrix number out of range");
        if (blk < 1 || blk > nblocks) throw fail("block number out of range");
        if (r > c) std::swap(r, c);
        const double v = std::stod(vtok);
        Entry e{static_cast<int>(blk - 1), static_cast<int>(r - 1), static_cast<int>(c - 1), matno == 0 ? -v : v};
        if (matno == 0) p.objective.push_back(e);
        else p.constraints[static_cast<std::size_t>(matno - 1)].push_back(e);
    }
    if (!in.eof()) throw fail("trailing garbage in entry list");
    p.validate();
    return p;
}

SdpProblem parse_sdpa(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_sdpa_text(ss.str());
}

} // namespace zb
