#include "ppf/matpower.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace ppf {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

struct Matrix {
    std::vector<std::vector<double>> rows;
    std::vector<int> line_numbers;  // source line of each row, for diagnostics
};

// Strips '%' comments and records 1-based line offsets.
std::vector<std::pair<int, std::string>> logical_lines(const std::string& text) {
    std::vector<std::pair<int, std::string>> out;
    std::istringstream is(text);
    std::string line;
    int no = 0;
    while (std::getline(is, line)) {
        ++no;
        auto pct = line.find('%');
        if (pct != std::string::npos) line.erase(pct);
        out.emplace_back(no, line);
    }
    return out;
}

bool parse_number(std::string_view tok, double& value) {
    const char* begin = tok.data();
    const char* end = begin + tok.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    return ec == std::errc() && ptr == end;
}

std::vector<double> parse_row(const std::string& row_text, int line_no) {
    std::vector<double> vals;
    std::istringstream is(row_text);
    std::string tok;
    while (is >> tok) {
        if (tok == ",") continue;
        if (!tok.empty() && tok.back() == ',') tok.pop_back();
        double v;
        if (!parse_number(tok, v))
            throw ParseError("line " + std::to_string(line_no) + ": bad numeric token '" +
                             tok + "'");
        vals.push_back(v);
    }
    return vals;
}

// Extracts `mpc.<name> = [ ... ];` as a row list. Rows end at ';' or newline.
Matrix extract_matrix(const std::vector<std::pair<int, std::string>>& lines,
                      const std::string& name) {
    const std::string open = "mpc." + name;
    Matrix m;
    bool in_matrix = false;
    std::string pending;
    int pending_line = 0;

    auto flush = [&]() {
        if (pending.find_first_not_of(" \t\r") == std::string::npos) {
            pending.clear();
            return;
        }
        auto vals = parse_row(pending, pending_line);
        if (!vals.empty()) {
            m.rows.push_back(std::move(vals));
            m.line_numbers.push_back(pending_line);
        }
        pending.clear();
    };

    for (const auto& [no, raw] : lines) {
        std::string line = raw;
        if (!in_matrix) {
            auto pos = line.find(open);
            if (pos == std::string::npos) continue;
            auto eq = line.find('=', pos);
            auto br = line.find('[', pos);
            if (eq == std::string::npos || br == std::string::npos) continue;
            in_matrix = true;
            line = line.substr(br + 1);
        }
        for (char c : line) {
            if (c == ']') {
                flush();
                return m;
            }
            if (c == ';' || c == '\n') {
                flush();
                pending_line = 0;
            } else {
                if (pending.empty()) pending_line = no;
                pending.push_back(c);
            }
        }
        flush();  // newline terminates a row as well
    }
    if (in_matrix) throw ParseError("matrix mpc." + name + " is not terminated by ];");
    throw ParseError("matrix mpc." + name + " not found");
}

double extract_scalar(const std::vector<std::pair<int, std::string>>& lines,
                      const std::string& name) {
    const std::string key = "mpc." + name;
    for (const auto& [no, line] : lines) {
        auto pos = line.find(key);
        if (pos == std::string::npos) continue;
        auto eq = line.find('=', pos);
        if (eq == std::string::npos) continue;
        auto sc = line.find(';', eq);
        std::string rhs = line.substr(eq + 1, sc == std::string::npos ? std::string::npos
                                                                      : sc - eq - 1);
        std::istringstream is(rhs);
        double v;
        if (is >> v) return v;
        throw ParseError("line " + std::to_string(no) + ": cannot parse mpc." + name);
    }
    throw ParseError("mpc." + name + " not found");
}

void require_columns(const Matrix& m, std::size_t need, const std::string& what) {
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
        if (m.rows[i].size() < need)
            throw ParseError("line " + std::to_string(m.line_numbers[i]) + ": " + what +
                             " row has " + std::to_string(m.rows[i].size()) +
                             " columns, need at least " + std::to_string(need));
    }
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

NetworkCase parse_case(const std::string& text) {
    auto lines = logical_lines(text);
    double base = extract_scalar(lines, "baseMVA");
    if (base <= 0.0) throw ValidationError("baseMVA must be positive");

    Matrix bus_m = extract_matrix(lines, "bus");
    Matrix gen_m = extract_matrix(lines, "gen");
    Matrix br_m = extract_matrix(lines, "branch");
    require_columns(bus_m, 10, "bus");
    require_columns(gen_m, 8, "gen");
    require_columns(br_m, 11, "branch");

    std::vector<Bus> buses;
    buses.reserve(bus_m.rows.size());
    for (std::size_t i = 0; i < bus_m.rows.size(); ++i) {
        const auto& r = bus_m.rows[i];
        Bus b;
        b.id = static_cast<int>(r[0]);
        int type = static_cast<int>(r[1]);
        switch (type) {
            case 1: b.kind = BusKind::Load; break;
            case 2: b.kind = BusKind::Generator; break;
            case 3: b.kind = BusKind::Slack; break;
            default:
                throw ParseError("line " + std::to_string(bus_m.line_numbers[i]) +
                                 ": unknown bus type " + std::to_string(type));
        }
        b.p_demand = r[2] / base;
        b.q_demand = r[3] / base;
        b.gs_shunt = r[4] / base;
        b.bs_shunt = r[5] / base;
        b.v_mag_init = r[7];
        b.v_ang_init = r[8] * kDegToRad;
        b.base_kv = r[9];
        buses.push_back(b);
    }

    std::vector<Gen> gens;
    gens.reserve(gen_m.rows.size());
    for (const auto& r : gen_m.rows) {
        Gen g;
        g.bus_id = static_cast<int>(r[0]);
        g.p_out = r[1] / base;
        g.q_out = r[2] / base;
        g.v_setpoint = r[5];
        g.in_service = r[7] > 0.0;
        gens.push_back(g);
    }

    std::vector<Branch> branches;
    branches.reserve(br_m.rows.size());
    for (const auto& r : br_m.rows) {
        Branch br;
        br.from_bus = static_cast<int>(r[0]);
        br.to_bus = static_cast<int>(r[1]);
        br.r = r[2];
        br.x = r[3];
        br.b_charge = r[4];
        br.tap = r[8] == 0.0 ? 1.0 : r[8];  // MATPOWER: ratio 0 means nominal
        br.shift = r[9] * kDegToRad;
        br.in_service = r[10] > 0.0;
        branches.push_back(br);
    }

    return NetworkCase(base, std::move(buses), std::move(gens), std::move(branches));
}

NetworkCase load_case(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open case file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_case(ss.str());
}

std::string serialize_case(const NetworkCase& c, const std::string& name) {
    std::ostringstream os;
    double base = c.base_mva();
    os << "function mpc = " << name << "\n";
    os << "mpc.version = '2';\n";
    os << "mpc.baseMVA = " << fmt(base) << ";\n";
    os << "mpc.bus = [\n";
    for (const Bus& b : c.buses()) {
        int type = b.kind == BusKind::Slack ? 3 : b.kind == BusKind::Generator ? 2 : 1;
        os << "\t" << b.id << "\t" << type << "\t" << fmt(b.p_demand * base) << "\t"
           << fmt(b.q_demand * base) << "\t" << fmt(b.gs_shunt * base) << "\t"
           << fmt(b.bs_shunt * base) << "\t1\t" << fmt(b.v_mag_init) << "\t"
           << fmt(b.v_ang_init / kDegToRad) << "\t" << fmt(b.base_kv) << ";\n";
    }
    os << "];\n";
    os << "mpc.gen = [\n";
    for (const Gen& g : c.gens()) {
        os << "\t" << g.bus_id << "\t" << fmt(g.p_out * base) << "\t"
           << fmt(g.q_out * base) << "\t0\t0\t" << fmt(g.v_setpoint) << "\t"
           << fmt(base) << "\t" << (g.in_service ? 1 : 0) << ";\n";
    }
    os << "];\n";
    os << "mpc.branch = [\n";
    for (const Branch& br : c.branches()) {
        os << "\t" << br.from_bus << "\t" << br.to_bus << "\t" << fmt(br.r) << "\t"
           << fmt(br.x) << "\t" << fmt(br.b_charge) << "\t0\t0\t0\t" << fmt(br.tap)
           << "\t" << fmt(br.shift / kDegToRad) << "\t" << (br.in_service ? 1 : 0)
           << ";\n";
    }
    os << "];\n";
    return os.str();
}

}  // namespace ppf
