#ifndef EFA_CSV_HPP
#define EFA_CSV_HPP

#include "efa/error.hpp"
#include "efa/grid.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace efa
{
/// Shortest round-trip representation, so outputs are reproducible byte for byte.
inline std::string format_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvWriter
{
public:
    CsvWriter(const std::filesystem::path& path, const std::vector< std::string >& header) : path_(path)
    {
        if (path.has_parent_path())
            std::filesystem::create_directories(path.parent_path());
        out_.open(path, std::ios::binary | std::ios::trunc);
        if (!out_)
            throw ConfigError("cannot write '" + path.string() + "'");
        if (!header.empty())
            row(header);
    }

    void row(const std::vector< std::string >& cells)
    {
        for (std::size_t i = 0; i < cells.size(); ++i)
            out_ << (i ? "," : "") << cells[i];
        out_ << '\n';
    }

    void line(const std::string& text) { out_ << text << '\n'; }

    ~CsvWriter() { out_.close(); }

private:
    std::filesystem::path path_;
    std::ofstream         out_;
};

/// 1D: `x,u` rows. 2D: `# t=<time> nx=<N> ny=<N>` then one comma-separated row per x₁ index.
template < int D >
void write_snapshot(const std::filesystem::path& path, const MacroGrid< D >& grid, double t, const std::vector< double >& u)
{
    require(u.size() == grid.size(), "write_snapshot: size mismatch");
    if constexpr (D == 1)
    {
        CsvWriter w(path, {"x", "u"});
        for (std::size_t k = 0; k < u.size(); ++k)
            w.row({format_number(grid.coord(k)[0]), format_number(u[k])});
    }
    else
    {
        const int n = grid.nodes_per_axis();
        CsvWriter w(path, {});
        w.line("# t=" + format_number(t) + " nx=" + std::to_string(n) + " ny=" + std::to_string(n));
        for (int i = 0; i < n; ++i)
        {
            std::vector< std::string > cells;
            for (int j = 0; j < n; ++j)
                cells.push_back(format_number(u[static_cast< std::size_t >(i) * n + j]));
            w.row(cells);
        }
    }
}
} // namespace efa

#endif // EFA_CSV_HPP
