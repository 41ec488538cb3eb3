#pragma once

#include <string>
#include <vector>

/* The shipped ledger of published reference-table values for the worked
 * example families, and the comparison of those values against what the
 * exact pipeline derives. Where the two disagree, the ledger records the
 * structural justification for the derived value. */

namespace attb {

struct DeviationCell {
    std::string table_id;
    std::string location;
    std::string object;   // evaluator key, e.g. "sec61.HM.1" or "sec62.K.3.1.0"
    std::string printed;  // canonical group string from the published table
    bool expect_deviation = false;
    std::string justification;
};

struct DeviationRecord {
    DeviationCell cell;
    std::string derived;
    bool deviates = false;
};

struct DeviationReport {
    std::vector<DeviationRecord> records;
    std::vector<DeviationRecord> deviations;  // derived != printed
    std::vector<std::string> errors;          // new unexplained deviations, stale entries
    /* The report is healthy when the expected discrepancies (and only
     * those) are present. */
    bool ok() const { return errors.empty() && !deviations.empty(); }
};

std::string default_ledger_path();

std::vector<DeviationCell> load_ledger(const std::string& path);

/* Evaluate one ledger object through the pipeline, as a canonical group
 * string. */
std::string evaluate_object(const std::string& object);

DeviationReport check_deviations(const std::string& ledger_path = default_ledger_path());

}  // namespace attb
