#include "implosion/profile_io.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace implosion {

namespace {

double parse_number(const std::string& field, std::size_t line) {
    double v = 0;
    const char* first = field.data();
    const char* last = first + field.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || field.empty())
        throw ParseError("line " + std::to_string(line) + ": not a number: '" + field + "'");
    return v;
}

std::string header_value(const std::string& header, const std::string& key) {
    std::istringstream in(header);
    std::string token;
    while (in >> token)
        if (token.rfind(key + "=", 0) == 0) return token.substr(key.size() + 1);
    throw ParseError("header lacks " + key + "=");
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_profile(std::ostream& out, const Params& p, const std::vector<ProfileSample>& samples) {
    out << "# implosion-profiles v1 gamma=" << format_double(p.gamma()) << " n=" << p.n()
        << " alpha=" << format_double(p.alpha()) << '\n';
    out << kProfileColumns << '\n';
    for (const auto& s : samples) {
        const double row[] = {s.state.y, s.state.rho, s.state.omega, s.aux.u,          s.aux.p,
                              s.aux.G,   s.aux.mass,  s.deriv.drho_dy, s.deriv.domega_dy};
        for (std::size_t i = 0; i < std::size(row); ++i) out << (i ? "," : "") << format_double(row[i]);
        out << '\n';
    }
    out << "# end rows=" << samples.size() << '\n';
}

ProfileFile read_profile(std::istream& in) {
    ProfileFile f;
    std::string line;
    if (!std::getline(in, line) || line.rfind("# implosion-profiles v1", 0) != 0)
        throw ParseError("missing '# implosion-profiles v1' header");
    f.gamma = parse_number(header_value(line, "gamma"), 1);
    double n = parse_number(header_value(line, "n"), 1);
    if (n != static_cast<int>(n)) throw ParseError("header n is not an integer");
    f.n = static_cast<int>(n);
    f.alpha = parse_number(header_value(line, "alpha"), 1);
    if (!std::getline(in, line) || line != kProfileColumns)
        throw ParseError(std::string("line 2: expected column line '") + kProfileColumns + "'");
    std::size_t lineno = 2;
    bool ended = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (ended) throw ParseError("line " + std::to_string(lineno) + ": data after end trailer");
        if (line.rfind("# end rows=", 0) == 0) {
            double rows = parse_number(line.substr(11), lineno);
            if (rows != static_cast<double>(f.states.size()))
                throw ParseError("trailer announces " + line.substr(11) + " rows, file has " +
                                 std::to_string(f.states.size()));
            ended = true;
            continue;
        }
        if (in.eof()) throw ParseError("line " + std::to_string(lineno) + ": unterminated final line");
        std::vector<double> vals;
        std::size_t start = 0;
        while (true) {
            std::size_t comma = line.find(',', start);
            vals.push_back(parse_number(line.substr(start, comma - start), lineno));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (vals.size() != 9)
            throw ParseError("line " + std::to_string(lineno) + ": expected 9 columns, found " +
                             std::to_string(vals.size()));
        f.states.push_back({vals[0], vals[1], vals[2]});
    }
    if (!ended) throw ParseError("file truncated: missing '# end rows=' trailer");
    return f;
}

}  // namespace implosion
