// Acceptance suite: one line per criterion. Exits 0 when every criterion passes or is a
// documented known failure; `efa check` applies the strict rule instead.
#include "efa/acceptance.hpp"
#include "efa/work_queue.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <iostream>

int main(int argc, char** argv)
{
    efa::acceptance::Options opt;
    opt.workers = efa::default_workers();
    for (int i = 1; i < argc; ++i)
    {
        if (std::strcmp(argv[i], "--out") == 0 && i + 1 < argc)
            opt.out = argv[++i];
        else if (std::strcmp(argv[i], "--workers") == 0 && i + 1 < argc)
            opt.workers = std::atoi(argv[++i]);
        else if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc)
            opt.only.push_back(std::atoi(argv[++i]));
        else
        {
            std::cerr << "usage: efa_acceptance [--out DIR] [--workers N] [--only ID]...\n";
            return 2;
        }
    }

    int unexpected = 0, known = 0, passed = 0;
    efa::acceptance::run(opt, [&](const efa::acceptance::Result& r) {
        const auto& kf       = efa::acceptance::known_failures;
        const bool  is_known = std::find(kf.begin(), kf.end(), r.id) != kf.end();
        std::cout << efa::acceptance::format_line(r);
        if (!r.pass && is_known)
            std::cout << " [known failure]";
        std::cout << std::endl;
        if (r.pass)
            ++passed;
        else if (is_known)
            ++known;
        else
            ++unexpected;
    });
    std::cout << passed << " passed, " << known << " known failures, " << unexpected << " unexpected failures\n";
    return unexpected == 0 ? 0 : 1;
}
