#include "driftplan/runlog.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "driftplan/errors.hpp"
#include "driftplan/textio.hpp"

namespace driftplan {

namespace {

void write_grid_block(std::ofstream& out, const GridSpec& grid, const Field2d& a,
                      const Field2d* b) {
    out << grid.rows << ' ' << grid.cols << ' ' << fmt_double(grid.cell_size) << '\n';
    for (int i = 0; i < grid.rows; ++i)
        for (int j = 0; j < grid.cols; ++j)
            out << i << ' ' << j << ' ' << fmt_double(a(i, j)) << ' '
                << fmt_double(b ? (*b)(i, j) : 0.0) << '\n';
}

struct LineReader {
    std::ifstream in;
    std::string path;
    int line_no = 0;
    std::string line;

    bool next() {
        if (!std::getline(in, line)) return false;
        ++line_no;
        return true;
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw MalformedFile(path + ":" + std::to_string(line_no) + ": " + what);
    }
};

std::pair<GridSpec, std::pair<Field2d, Field2d>> read_grid_block(LineReader& r) {
    if (!r.next()) r.fail("unexpected end of file, expected grid header");
    GridSpec grid;
    {
        std::istringstream hs(r.line);
        std::string extra;
        if (!(hs >> grid.rows >> grid.cols >> grid.cell_size) || (hs >> extra) ||
            grid.rows < 1 || grid.cols < 1)
            r.fail("bad grid header '" + r.line + "'");
    }
    Field2d a(grid.rows, grid.cols), b(grid.rows, grid.cols);
    long total = static_cast<long>(grid.rows) * grid.cols;
    for (long k = 0; k < total; ++k) {
        if (!r.next()) r.fail("grid block truncated");
        std::istringstream ls(r.line);
        int i, j;
        double va, vb;
        std::string extra;
        if (!(ls >> i >> j >> va >> vb) || (ls >> extra)) r.fail("bad grid row '" + r.line + "'");
        if (i != k / grid.cols || j != k % grid.cols) r.fail("grid row out of order");
        a(i, j) = va;
        b(i, j) = vb;
    }
    return {grid, {std::move(a), std::move(b)}};
}

}  // namespace

void write_runlog(const RunLog& log, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw MalformedFile("cannot open for write: " + path.string());
    out << "# driftplan run log\n";
    for (const auto& [key, value] : log.header) out << key << '=' << value << '\n';
    out << "RECORDS\n";
    for (const std::string& record : log.records) out << record << '\n';
    out << "SAMPLE_SUMMARY asv " << log.asv_samples << " drifter " << log.drifter_samples
        << " total " << (log.asv_samples + log.drifter_samples) << '\n';
    out << "GRID mean\n";
    write_grid_block(out, log.mean_field.grid, log.mean_field.u, &log.mean_field.v);
    out << "GRID variance\n";
    write_grid_block(out, log.mean_field.grid, log.variance, nullptr);
    out << "GRID rmse\n";
    write_grid_block(out, log.mean_field.grid, log.rmse_map, nullptr);
    out << "END\n";
    if (!out) throw MalformedFile("write failed: " + path.string());
}

RunLog read_runlog(const std::filesystem::path& path) {
    LineReader r;
    r.in.open(path);
    r.path = path.string();
    if (!r.in) throw MalformedFile("cannot open run log: " + path.string());

    RunLog log;

    // Header block up to the RECORDS marker.
    for (;;) {
        if (!r.next()) r.fail("missing RECORDS marker");
        if (r.line.empty() || r.line[0] == '#') continue;
        if (r.line == "RECORDS") break;
        size_t eq = r.line.find('=');
        if (eq == std::string::npos) r.fail("expected key=value or RECORDS, got '" + r.line + "'");
        log.header.emplace_back(r.line.substr(0, eq), r.line.substr(eq + 1));
    }

    // Typed records up to SAMPLE_SUMMARY.
    for (;;) {
        if (!r.next()) r.fail("missing SAMPLE_SUMMARY line");
        std::istringstream ls(r.line);
        std::string tag;
        ls >> tag;
        if (tag == "SAMPLE_SUMMARY") {
            std::string asv_word, drifter_word, total_word;
            long long total = 0;
            if (!(ls >> asv_word >> log.asv_samples >> drifter_word >> log.drifter_samples >>
                  total_word >> total) ||
                asv_word != "asv" || drifter_word != "drifter" || total_word != "total" ||
                total != log.asv_samples + log.drifter_samples)
                r.fail("bad SAMPLE_SUMMARY line");
            break;
        }
        auto want_done = [&] {
            std::string extra;
            if (ls >> extra) r.fail("trailing fields on '" + r.line + "'");
        };
        if (tag == "UPDATE") {
            UpdateRecord u;
            if (!(ls >> u.idx >> u.t >> u.rmse >> u.asv_row >> u.asv_col))
                r.fail("bad UPDATE line");
            want_done();
            log.updates.push_back(u);
        } else if (tag == "RMSE") {
            double t, value;
            if (!(ls >> t >> value)) r.fail("bad RMSE line");
            want_done();
            if (log.updates.empty() || std::abs(log.updates.back().t - t) > 1e-9)
                r.fail("RMSE line does not follow its UPDATE");
        } else if (tag == "DECISION") {
            DecisionRecord d;
            std::string kind;
            if (!(ls >> d.update_idx >> kind >> d.comparison_score >> d.best_proposal_score >>
                  d.chosen_row >> d.chosen_col))
                r.fail("bad DECISION line");
            want_done();
            if (kind == "SAMPLE") d.kind = DecisionKind::Sample;
            else if (kind == "DEPLOY") d.kind = DecisionKind::Deploy;
            else r.fail("bad DECISION kind '" + kind + "'");
            log.decisions.push_back(d);
        } else if (tag == "PROPOSAL") {
            int update_idx, row, col;
            double score;
            if (!(ls >> update_idx >> row >> col >> score)) r.fail("bad PROPOSAL line");
            want_done();
        } else if (tag == "DEPLOY") {
            DeployRecord d;
            if (!(ls >> d.t >> d.drifter_id >> d.row >> d.col)) r.fail("bad DEPLOY line");
            want_done();
            log.deploys.push_back(d);
        } else if (tag == "TRACK") {
            int id;
            double t, x, y;
            if (!(ls >> id >> t >> x >> y)) r.fail("bad TRACK line");
            want_done();
        } else {
            r.fail("unknown record tag '" + tag + "'");
        }
        log.records.push_back(r.line);
    }

    auto expect_marker = [&](const std::string& marker) {
        if (!r.next()) r.fail("missing '" + marker + "' marker");
        if (r.line != marker) r.fail("expected '" + marker + "', got '" + r.line + "'");
    };

    expect_marker("GRID mean");
    auto [grid, mean_uv] = read_grid_block(r);
    log.mean_field = {grid, std::move(mean_uv.first), std::move(mean_uv.second)};
    expect_marker("GRID variance");
    log.variance = read_grid_block(r).second.first;
    expect_marker("GRID rmse");
    log.rmse_map = read_grid_block(r).second.first;
    expect_marker("END");
    return log;
}

void write_summary(const std::vector<BatchRun>& runs, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw MalformedFile("cannot open for write: " + path.string());
    out << "field_id,cfg_id,seed,t,rmse\n";
    for (const BatchRun& run : runs)
        for (const UpdateRecord& u : run.log.updates)
            out << run.field_id << ',' << run.cfg_id << ',' << run.seed << ','
                << fmt_double(u.t) << ',' << fmt_double(u.rmse) << '\n';
    if (!out) throw MalformedFile("write failed: " + path.string());
}

}  // namespace driftplan
