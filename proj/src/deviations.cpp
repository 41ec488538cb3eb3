#include "attb/deviations.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "attb/ktheory.hpp"

namespace attb {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    return parts;
}

}  // namespace

std::string default_ledger_path() {
    if (const char* env = std::getenv("ATTB_LEDGER")) return env;
#ifdef ATTB_SOURCE_DATA_DIR
    return std::string(ATTB_SOURCE_DATA_DIR) + "/printed_tables.json";
#else
    return "data/printed_tables.json";
#endif
}

std::vector<DeviationCell> load_ledger(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open ledger file: " + path);
    nlohmann::json j;
    in >> j;
    std::vector<DeviationCell> cells;
    for (const auto& table : j.at("tables")) {
        std::string id = table.at("id").get<std::string>();
        std::string loc = table.value("location", "");
        for (const auto& c : table.at("cells")) {
            DeviationCell cell;
            cell.table_id = id;
            cell.location = loc;
            cell.object = c.at("object").get<std::string>();
            cell.printed = c.at("printed").get<std::string>();
            cell.expect_deviation = c.value("expect_deviation", false);
            cell.justification = c.value("justification", "");
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

std::string evaluate_object(const std::string& object) {
    auto parts = split(object, '.');
    if (parts.size() < 3) throw std::invalid_argument("bad ledger object: " + object);
    const std::string& fam_name = parts[0];
    const std::string& kind = parts[1];

    if (kind == "HM" || kind == "HML") {
        catalog::Family fam = catalog::family_by_name(fam_name);
        int i = std::stoi(parts[2]);
        return cohomology_groups(fam.lambda)[i].to_string();
    }
    if (kind == "HMZ") {
        catalog::Family fam = catalog::family_by_name(fam_name);
        int i = std::stoi(parts[2]);
        return cohomology_groups(trivial_system(fam.lambda.base, 1))[i].to_string();
    }
    if (kind == "HX") {
        if (parts.size() != 4) throw std::invalid_argument("bad ledger object: " + object);
        catalog::Family fam = catalog::family_by_name(fam_name);
        long j = std::stol(parts[2]);
        int i = std::stoi(parts[3]);
        auto t = total_cohomology(final_page(fam.bundle(j)), ExtensionPolicy::Split);
        return t.assembled[i].to_string();
    }
    if (kind == "K") {
        if (parts.size() != 5) throw std::invalid_argument("bad ledger object: " + object);
        catalog::Family fam = catalog::family_by_name(fam_name);
        long j = std::stol(parts[2]);
        long k = std::stol(parts[3]);
        int parity = std::stoi(parts[4]);
        KTableCell cell = ktable_cell(fam, j, k);
        if (cell.undetermined) return "undetermined";
        return parity == 0 ? cell.resolved.k0.to_string() : cell.resolved.k1.to_string();
    }
    throw std::invalid_argument("unknown ledger object kind: " + object);
}

DeviationReport check_deviations(const std::string& ledger_path) {
    DeviationReport rep;
    for (const DeviationCell& cell : load_ledger(ledger_path)) {
        DeviationRecord rec;
        rec.cell = cell;
        rec.derived = evaluate_object(cell.object);
        rec.deviates = rec.derived != cell.printed;
        if (rec.deviates && !cell.expect_deviation)
            rep.errors.push_back("NEW unexplained deviation at " + cell.object + ": printed " +
                                 cell.printed + ", derived " + rec.derived);
        if (!rec.deviates && cell.expect_deviation)
            rep.errors.push_back("stale ledger entry at " + cell.object +
                                 ": printed and derived now agree (" + rec.derived + ")");
        if (rec.deviates) rep.deviations.push_back(rec);
        rep.records.push_back(std::move(rec));
    }
    return rep;
}

}  // namespace attb
