// Regenerates the bundled fixture data under data/fixtures/. Deterministic:
// rerunning produces byte-identical files.
//
//   mixing_108/  one-period network whose race mixing rows reproduce the
//                published 108th-Congress shares (377/38/24 roster)
//   paper_panel/ 12-period synthetic weighted panel with every covariate the
//                bundled paper-model config needs

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "tergm/rng.hpp"
#include "tergm/util.hpp"

namespace fs = std::filesystem;
using tergm::Rng;
using tergm::format_double;

namespace {

struct Cell {
    int sender_group, receiver_group;
    long long count;
};

void write_mixing_fixture(const fs::path& dir) {
    fs::create_directories(dir);
    const std::vector<std::string> levels = {"white", "black", "latino"};
    const std::vector<int> sizes = {377, 38, 24};

    std::vector<std::vector<std::string>> groups(3);
    for (int k = 1; k <= sizes[0]; ++k) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "w%03d", k);
        groups[0].push_back(buf);
    }
    for (int k = 1; k <= sizes[1]; ++k) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "b%02d", k);
        groups[1].push_back(buf);
    }
    for (int k = 1; k <= sizes[2]; ++k) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "l%02d", k);
        groups[2].push_back(buf);
    }

    // Cell counts chosen so the row shares round to the published values:
    //   white row 90.71 / 5.96 / 3.32   (1023 out-ties)
    //   black row 72.18 / 22.81 / 5.02  (877)
    //   latino row 78.00 / 10.57 / 11.43 (350)
    const std::vector<Cell> cells = {
        {0, 0, 928}, {0, 1, 61}, {0, 2, 34},
        {1, 0, 633}, {1, 1, 200}, {1, 2, 44},
        {2, 0, 273}, {2, 1, 37}, {2, 2, 40},
    };

    std::ofstream edges(dir / "edges.csv");
    edges << "period_label,sender_id,receiver_id,weight\n";
    for (const Cell& cell : cells) {
        const auto& senders = groups[static_cast<std::size_t>(cell.sender_group)];
        const auto& receivers = groups[static_cast<std::size_t>(cell.receiver_group)];
        auto n_senders = static_cast<long long>(senders.size());
        for (long long s = 0; s < n_senders; ++s) {
            long long quota = cell.count / n_senders + (s < cell.count % n_senders ? 1 : 0);
            long long taken = 0;
            for (std::size_t r = 0; r < receivers.size() && taken < quota; ++r) {
                if (cell.sender_group == cell.receiver_group &&
                    r == static_cast<std::size_t>(s))
                    continue;
                edges << "108," << senders[static_cast<std::size_t>(s)] << ',' << receivers[r]
                      << ",2\n";
                ++taken;
            }
            if (taken < quota) throw tergm::Error("mixing fixture: cell quota unsatisfiable");
        }
    }

    // roster attributes; gender split 379/60 with women spread evenly
    std::vector<std::string> roster;
    for (const auto& g : groups) roster.insert(roster.end(), g.begin(), g.end());
    std::sort(roster.begin(), roster.end());
    std::ofstream attrs(dir / "attributes.csv");
    attrs << "period_label,node_id,attr_name,value\n";
    for (std::size_t k = 0; k < roster.size(); ++k) {
        const std::string& id = roster[k];
        std::string race = id[0] == 'w' ? "white" : id[0] == 'b' ? "black" : "latino";
        attrs << "108," << id << ",race," << race << '\n';
        bool woman = k % 7 == 0 && k < 420;  // 60 of 439
        attrs << "108," << id << ",gender," << (woman ? "women" : "men") << '\n';
    }
}

struct Member {
    std::string id;
    std::string race;     // white/black/latino
    std::string gender;   // men/women
    std::string party;    // d/r
    double ideology_base = 0.0;
    double pct_black = 0.0, pct_hispanic = 0.0;
    int seniority0 = 0;
    int committee = 0;
};

void write_paper_panel(const fs::path& dir) {
    fs::create_directories(dir);
    Rng rng(20240811);
    const int n = 40;

    std::vector<Member> members;
    for (int k = 1; k <= n; ++k) {
        Member m;
        char buf[16];
        std::snprintf(buf, sizeof(buf), "m%02d", k);
        m.id = buf;
        m.race = k <= 30 ? "white" : k <= 36 ? "black" : "latino";
        m.gender = (k == 5 || k == 12 || k == 18 || k == 25 || k == 31 || k == 33 || k == 37 ||
                    k == 39)
                       ? "women"
                       : "men";
        m.party = k <= 21 ? "d" : "r";
        m.ideology_base = m.party == "d" ? -rng.uniform() : rng.uniform();
        if (m.race == "black") {
            m.pct_black = 20.0 + 40.0 * rng.uniform();
            m.pct_hispanic = 15.0 * rng.uniform();
        } else if (m.race == "latino") {
            m.pct_hispanic = 20.0 + 40.0 * rng.uniform();
            m.pct_black = 15.0 * rng.uniform();
        } else {
            double u = rng.uniform(), v = rng.uniform();
            m.pct_black = 60.0 * u * u;
            m.pct_hispanic = 60.0 * v * v;
        }
        m.seniority0 = 1 + rng.uniform_index(10);
        m.committee = (k - 1) % 4;
        members.push_back(std::move(m));
    }

    auto present = [&](int member_idx, int congress) {
        if (member_idx == 38 && (congress == 99 || congress == 100)) return false;  // m39
        if (member_idx == 39 && congress == 103) return false;                      // m40
        return true;
    };
    const std::vector<std::string> majority = {"d", "d", "r", "r", "d", "r",
                                               "r", "d", "d", "r", "r", "r"};

    std::ofstream edges(dir / "edges.csv");
    std::ofstream attrs(dir / "attributes.csv");
    std::ofstream covs(dir / "dyad_covariates.csv");
    edges << "period_label,sender_id,receiver_id,weight\n";
    attrs << "period_label,node_id,attr_name,value\n";
    covs << "period_label,sender_id,receiver_id,cov_name,value\n";

    for (int t = 0; t < 12; ++t) {
        int congress = 97 + t;
        std::string label = std::to_string(congress);

        std::vector<double> ideology(n), margin(n);
        std::vector<int> bills(n), race_bills(n);
        std::vector<double> present_ideologies;
        for (int k = 0; k < n; ++k) {
            ideology[k] = std::clamp(members[k].ideology_base + 0.1 * (rng.uniform() - 0.5),
                                     -1.0, 1.0);
            margin[k] = 50.0 + 50.0 * rng.uniform();
            bills[k] = 2 + rng.uniform_index(38);
            bool minority = members[k].race != "white";
            race_bills[k] = minority ? 1 + rng.uniform_index(7) : rng.uniform_index(4);
            if (present(k, congress)) present_ideologies.push_back(ideology[k]);
        }
        std::sort(present_ideologies.begin(), present_ideologies.end());
        double median = present_ideologies[present_ideologies.size() / 2];

        for (int k = 0; k < n; ++k) {
            if (!present(k, congress)) continue;
            const Member& m = members[k];
            attrs << label << ',' << m.id << ",race," << m.race << '\n';
            attrs << label << ',' << m.id << ",gender," << m.gender << '\n';
            attrs << label << ',' << m.id << ",party," << m.party << '\n';
            attrs << label << ',' << m.id << ",majority,"
                  << (m.party == majority[static_cast<std::size_t>(t)] ? 1 : 0) << '\n';
            attrs << label << ',' << m.id << ",margin," << format_double(margin[k]) << '\n';
            attrs << label << ',' << m.id << ",seniority," << m.seniority0 + t << '\n';
            attrs << label << ',' << m.id << ",ideology," << format_double(ideology[k]) << '\n';
            attrs << label << ',' << m.id << ",extremity,"
                  << format_double(std::fabs(ideology[k] - median)) << '\n';
            attrs << label << ',' << m.id << ",pct_black," << format_double(m.pct_black) << '\n';
            attrs << label << ',' << m.id << ",pct_hispanic," << format_double(m.pct_hispanic)
                  << '\n';
            attrs << label << ',' << m.id << ",bills," << bills[k] << '\n';
            attrs << label << ',' << m.id << ",race_bills," << race_bills[k] << '\n';
            attrs << label << ',' << m.id << ",is_white," << (m.race == "white" ? 1 : 0) << '\n';
            attrs << label << ',' << m.id << ",is_black," << (m.race == "black" ? 1 : 0) << '\n';
            attrs << label << ',' << m.id << ",is_latino," << (m.race == "latino" ? 1 : 0)
                  << '\n';
        }

        for (int i = 0; i < n; ++i) {
            if (!present(i, congress)) continue;
            for (int j = 0; j < n; ++j) {
                if (i == j || !present(j, congress)) continue;
                if (members[i].committee == members[j].committee)
                    covs << label << ',' << members[i].id << ',' << members[j].id
                         << ",same_committee,1\n";
                double p1 = 0.22;
                if (members[i].party == members[j].party) p1 += 0.08;
                if (members[i].race == members[j].race) p1 += 0.12;
                if (bills[j] > 25) p1 += 0.06;
                double u = rng.uniform();
                long long w = 0;
                if (u < 0.55 * p1)
                    w = 2 + static_cast<long long>(rng.uniform_int(2));
                else if (u < p1)
                    w = 1;
                if (w > 0)
                    edges << label << ',' << members[i].id << ',' << members[j].id << ',' << w
                          << '\n';
            }
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    fs::path root = argc > 1 ? argv[1] : "data/fixtures";
    write_mixing_fixture(root / "mixing_108");
    write_paper_panel(root / "paper_panel");
    std::printf("fixtures written under %s\n", root.string().c_str());
    return 0;
}
