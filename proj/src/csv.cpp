#include "rough/csv.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <vector>

namespace rough {

namespace {

std::ofstream open_out(const std::string& filename) {
    std::ofstream os(filename);
    if (!os) throw ConfigError("cannot open for writing: " + filename);
    return os;
}

void put(std::ostream& os, double v) { os << std::setprecision(17) << v; }

double parse_num(const std::string& cell) {
    try {
        size_t pos = 0;
        double v = std::stod(cell, &pos);
        if (pos != cell.size()) throw ConfigError("path CSV: malformed number: " + cell);
        return v;
    } catch (const std::logic_error&) {
        throw ConfigError("path CSV: malformed number: " + cell);
    }
}

}  // namespace

void write_path_csv(const Path1& p, std::ostream& os) {
    os << "t";
    for (int c = 1; c <= p.dim; ++c) os << ",x" << c;
    os << "\n";
    for (int i = 0; i <= p.grid.n; ++i) {
        put(os, p.grid.t(i));
        for (int c = 0; c < p.dim; ++c) {
            os << ",";
            put(os, p.at(i, c));
        }
        os << "\n";
    }
}

void write_path_csv(const Path1& p, const std::string& filename) {
    auto os = open_out(filename);
    write_path_csv(p, os);
}

Path1 read_path_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("path CSV: empty input");
    int dim = 0;
    for (char ch : line) dim += ch == ',';
    if (dim < 1 || line.substr(0, 1) != "t") throw ConfigError("path CSV: bad header");
    std::vector<double> times;
    std::vector<double> vals;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        if (!std::getline(row, cell, ',')) throw ConfigError("path CSV: bad row");
        times.push_back(parse_num(cell));
        for (int c = 0; c < dim; ++c) {
            if (!std::getline(row, cell, ',')) throw ConfigError("path CSV: short row");
            vals.push_back(parse_num(cell));
        }
    }
    if (times.size() < 2) throw ConfigError("path CSV: need at least two rows");
    double h = times[1] - times[0];
    for (size_t i = 1; i < times.size(); ++i)
        if (std::abs(times[i] - times[i - 1] - h) > 1e-9 * std::max(1.0, std::abs(h)))
            throw ConfigError("path CSV: non-uniform time column");
    Path1 p(Grid(times[0], h, static_cast<int>(times.size()) - 1), dim);
    p.values = std::move(vals);
    return p;
}

Path1 read_path_csv(const std::string& filename) {
    std::ifstream is(filename);
    if (!is) throw ConfigError("cannot open for reading: " + filename);
    return read_path_csv(is);
}

void write_area_family_csv(const AreaFamily& f, int d, std::ostream& os) {
    os << "cell,i,j,value\n";
    for (int c = f.c_lo; c <= f.c_hi; ++c)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                os << c << "," << i + 1 << "," << j + 1 << ",";
                put(os, f.cells[(static_cast<size_t>(c) * d + i) * d + j]);
                os << "\n";
            }
}

void write_volume_family_csv(const VolumeFamily& f, int d, std::ostream& os) {
    os << "cell,i,j,k,value\n";
    for (int c = f.c_lo; c <= f.c_hi; ++c)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k) {
                    os << c << "," << i + 1 << "," << j + 1 << "," << k + 1 << ",";
                    put(os, f.cells[((static_cast<size_t>(c) * d + i) * d + j) * d + k]);
                    os << "\n";
                }
}

void export_lift_csv(const DelayedLift& lift, const std::string& dir) {
    int d = lift.dim();
    for (int k : lift.difference_set()) {
        auto os = open_out(dir + "/area_v" + std::to_string(k) + ".csv");
        write_area_family_csv(lift.area_family(k), d, os);
    }
    const std::vector<int>& kd = lift.delay_cells();
    int q = lift.delay_count();
    auto emit = [&](int k1, int k2) {
        if (!lift.has_volume(k1, k2)) return;
        auto os = open_out(dir + "/volume_v1" + std::to_string(k1) + "_v2" + std::to_string(k2) +
                           ".csv");
        write_volume_family_csv(lift.volume_family(k1, k2), d, os);
    };
    for (int ip = 1; ip <= q; ++ip)
        for (int jp = 1; jp <= q; ++jp) emit(kd[jp], kd[ip]);
    for (int ip = 0; ip <= q; ++ip)
        for (int jp = 0; jp <= q; ++jp) emit(kd[jp] - kd[ip], kd[ip]);
}

void write_audit_csv(const AuditReport& rep, std::ostream& os) {
    os << "identity,residual,scale,relative\n";
    for (const AuditItem& it : rep.items) {
        os << it.identity << ",";
        put(os, it.residual);
        os << ",";
        put(os, it.scale);
        os << ",";
        put(os, it.relative());
        os << "\n";
    }
}

void write_mc_header(std::ostream& os) { os << "H,v1,v2,tau,N,mean,stderr,closed_form,z\n"; }

void write_mc_row(const McAreaReport& rep, std::ostream& os) {
    put(os, rep.H);
    os << ",";
    put(os, rep.v1);
    os << ",0,";
    put(os, rep.tau);
    os << "," << rep.N << ",";
    put(os, rep.mean);
    os << ",";
    put(os, rep.stderr_);
    os << ",";
    put(os, rep.closed_form);
    os << ",";
    put(os, rep.z);
    os << "\n";
}

void write_scaling_csv(const ScalingReport& rep, int N, std::ostream& os) {
    os << "level,H,v1,v2,tau,N,second_moment,slope\n";
    for (size_t t = 0; t < rep.taus.size(); ++t) {
        os << rep.level << ",";
        put(os, rep.H);
        os << ",";
        put(os, rep.v1);
        os << ",";
        put(os, rep.v2);
        os << ",";
        put(os, rep.taus[t]);
        os << "," << N << ",";
        put(os, rep.second_moments[t]);
        os << ",";
        put(os, rep.slope);
        os << "\n";
    }
}

void write_report_kv(const SolveReport& rep, std::ostream& os) {
    os << "method = " << rep.method << "\n";
    os << "steps = " << rep.steps << "\n";
    os << "germ_residual = ";
    put(os, rep.germ_residual);
    os << "\n";
    if (rep.picard_iters >= 0) os << "picard_iters = " << rep.picard_iters << "\n";
    os << "t_end = ";
    put(os, rep.y.grid.t_end());
    os << "\n";
    for (int c = 0; c < rep.y.dim; ++c) {
        os << "y_end_" << c + 1 << " = ";
        put(os, rep.y.at(rep.y.grid.n, c));
        os << "\n";
    }
}

}  // namespace rough
