#include "icuharm/demo.hpp"

#include "icuharm/callback.hpp"
#include "icuharm/error.hpp"
#include "icuharm/value.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>

namespace icuharm {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr std::int64_t kMinute = 60;
constexpr std::int64_t kDay = 86400;
constexpr double kMinutesPerYear = 525960.0;
constexpr const char* kAbxRegex = "cillin|cef|mycin|vanco|penem|floxacin";

class CsvOut {
public:
    CsvOut(const fs::path& path, std::vector<std::string> header) : out_(path, std::ios::binary) {
        if (!out_) throw Error(Errc::io_error, "cannot write " + path.string());
        row(header);
        rows_ = 0;
    }

    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            const auto& f = fields[i];
            if (f.find_first_of(",\"\n\r") != std::string::npos) {
                out_ << '"';
                for (char ch : f) {
                    if (ch == '"') out_ << '"';
                    out_ << ch;
                }
                out_ << '"';
            } else {
                out_ << f;
            }
        }
        out_ << '\n';
        ++rows_;
    }

    std::size_t rows() const noexcept { return rows_; }

private:
    std::ofstream out_;
    std::size_t rows_ = 0;
};

std::string num(double v) { return format_double(v); }
std::string num(std::int64_t v) { return std::to_string(v); }
std::string ts(std::int64_t secs) { return format_timestamp(secs); }

struct Obs {
    std::string concept_name;
    std::int64_t offset;
    double value;
};

struct Lab {
    std::int64_t itemid;
    std::string wide_name;
    std::string concept_name;
    std::string unit;
    std::int64_t offset;
    double value;
};

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(gen_);
    }
    bool chance(double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(gen_) < p; }
    template <class T>
    const T& pick(const std::vector<T>& v) {
        return v[static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(v.size()) - 1))];
    }

private:
    std::mt19937_64 gen_;
};

json column(const std::string& name, const std::string& spec) { return {{"name", name}, {"spec", spec}}; }

json long_config() {
    json j;
    j["name"] = "demo_long";
    j["prefix"] = {"demo_long", "long_eav"};
    j["id_cfg"] = {
        {"patient", {{"id", "subject_id"}, {"position", 1}, {"table", "patients"}, {"start", "dob"}, {"end", "dod"}}},
        {"hadm",
         {{"id", "hadm_id"}, {"position", 2}, {"table", "admissions"}, {"start", "admittime"}, {"end", "dischtime"}}},
        {"icustay",
         {{"id", "icustay_id"}, {"position", 3}, {"table", "icustays"}, {"start", "intime"}, {"end", "outtime"}}},
    };
    j["col_cfg"] = {
        {"patients", {{"id_var", "subject_id"}, {"time_vars", {"dob", "dod"}}}},
        {"admissions",
         {{"id_var", "hadm_id"}, {"index_var", "admittime"}, {"time_vars", {"admittime", "dischtime", "deathtime"}}}},
        {"icustays", {{"id_var", "icustay_id"}, {"index_var", "intime"}, {"time_vars", {"intime", "outtime"}}}},
        {"chartevents",
         {{"id_var", "icustay_id"},
          {"index_var", "charttime"},
          {"time_vars", {"charttime"}},
          {"unit_var", "valueuom"},
          {"val_var", "valuenum"}}},
        {"labevents",
         {{"id_var", "hadm_id"},
          {"index_var", "charttime"},
          {"time_vars", {"charttime"}},
          {"unit_var", "valueuom"},
          {"val_var", "valuenum"}}},
        {"prescriptions",
         {{"id_var", "hadm_id"}, {"index_var", "startdate"}, {"time_vars", {"startdate"}}, {"val_var", "drug"}}},
        {"d_items", {{"id_var", "itemid"}}},
    };
    json t;
    t["patients"] = {{"files", {"PATIENTS.csv"}},
                     {"cols",
                      {{"SUBJECT_ID", column("subject_id", "int")},
                       {"GENDER", column("gender", "string")},
                       {"DOB", column("dob", "timestamp")},
                       {"DOD", column("dod", "timestamp")}}}};
    t["admissions"] = {{"files", {"ADMISSIONS.csv"}},
                       {"cols",
                        {{"SUBJECT_ID", column("subject_id", "int")},
                         {"HADM_ID", column("hadm_id", "int")},
                         {"ADMITTIME", column("admittime", "timestamp")},
                         {"DISCHTIME", column("dischtime", "timestamp")},
                         {"DEATHTIME", column("deathtime", "timestamp")},
                         {"ADMISSION_TYPE", column("admission_type", "string")},
                         {"HOSPITAL_EXPIRE_FLAG", column("hospital_expire_flag", "int")}}}};
    t["icustays"] = {{"files", {"ICUSTAYS.csv"}},
                     {"cols",
                      {{"SUBJECT_ID", column("subject_id", "int")},
                       {"HADM_ID", column("hadm_id", "int")},
                       {"ICUSTAY_ID", column("icustay_id", "int")},
                       {"INTIME", column("intime", "timestamp")},
                       {"OUTTIME", column("outtime", "timestamp")}}}};
    t["chartevents"] = {{"files", {"CHARTEVENTS.csv"}},
                        {"cols",
                         {{"SUBJECT_ID", column("subject_id", "int")},
                          {"HADM_ID", column("hadm_id", "int")},
                          {"ICUSTAY_ID", column("icustay_id", "int")},
                          {"ITEMID", column("itemid", "int")},
                          {"CHARTTIME", column("charttime", "timestamp")},
                          {"VALUE", column("value", "string")},
                          {"VALUENUM", column("valuenum", "float")},
                          {"VALUEUOM", column("valueuom", "string")}}},
                        {"partitioning", {{"col", "itemid"}, {"breaks", {220000}}}}};
    t["labevents"] = {{"files", {"LABEVENTS.csv"}},
                      {"cols",
                       {{"SUBJECT_ID", column("subject_id", "int")},
                        {"HADM_ID", column("hadm_id", "int")},
                        {"ITEMID", column("itemid", "int")},
                        {"CHARTTIME", column("charttime", "timestamp")},
                        {"VALUENUM", column("valuenum", "float")},
                        {"VALUEUOM", column("valueuom", "string")}}}};
    t["prescriptions"] = {{"files", {"PRESCRIPTIONS.csv"}},
                          {"cols",
                           {{"SUBJECT_ID", column("subject_id", "int")},
                            {"HADM_ID", column("hadm_id", "int")},
                            {"STARTDATE", column("startdate", "date")},
                            {"DRUG", column("drug", "string")}}}};
    t["d_items"] = {{"files", {"D_ITEMS.csv"}},
                    {"cols", {{"ITEMID", column("itemid", "int")}, {"LABEL", column("label", "string")}}}};
    j["tbl_cfg"] = t;
    return j;
}

json wide_config() {
    json j;
    j["name"] = "demo_wide";
    j["prefix"] = {"demo_wide", "wide_offsets"};
    j["id_cfg"] = {
        {"icustay", {{"id", "patientunitstayid"}, {"position", 1}, {"table", "patient"}, {"end", "unitdischargeoffset"}}},
    };
    j["col_cfg"] = {
        {"patient",
         {{"id_var", "patientunitstayid"}, {"time_vars", {"unitdischargeoffset", "hospitaldischargeoffset"}}}},
        {"vitalperiodic",
         {{"id_var", "patientunitstayid"}, {"index_var", "observationoffset"}, {"time_vars", {"observationoffset"}}}},
        {"lab",
         {{"id_var", "patientunitstayid"},
          {"index_var", "labresultoffset"},
          {"time_vars", {"labresultoffset"}},
          {"val_var", "labresult"}}},
        {"medication",
         {{"id_var", "patientunitstayid"},
          {"index_var", "drugstartoffset"},
          {"time_vars", {"drugstartoffset"}},
          {"val_var", "drugname"}}},
    };
    json t;
    t["patient"] = {{"cols",
                     {{"patientunitstayid", column("patientunitstayid", "int")},
                      {"gender", column("gender", "string")},
                      {"age", column("age", "float")},
                      {"admissionweight", column("admissionweight", "float")},
                      {"unitdischargeoffset", column("unitdischargeoffset", "duration")},
                      {"hospitaldischargeoffset", column("hospitaldischargeoffset", "duration")},
                      {"hospitaldischargestatus", column("hospitaldischargestatus", "string")}}}};
    t["vitalperiodic"] = {{"cols",
                           {{"patientunitstayid", column("patientunitstayid", "int")},
                            {"observationoffset", column("observationoffset", "duration")},
                            {"heartrate", column("heartrate", "float")},
                            {"temperature", column("temperature", "float")},
                            {"respiration", column("respiration", "float")}}}};
    t["lab"] = {{"cols",
                 {{"patientunitstayid", column("patientunitstayid", "int")},
                  {"labresultoffset", column("labresultoffset", "duration")},
                  {"labname", column("labname", "string")},
                  {"labresult", column("labresult", "float")}}}};
    t["medication"] = {{"cols",
                        {{"patientunitstayid", column("patientunitstayid", "int")},
                         {"drugstartoffset", column("drugstartoffset", "duration")},
                         {"drugname", column("drugname", "string")}}}};
    j["tbl_cfg"] = t;
    return j;
}

json sel(const std::string& table, const std::string& sub_var, json ids) {
    return {{"class", "sel_itm"}, {"table", table}, {"sub_var", sub_var}, {"ids", std::move(ids)}};
}

json col(const std::string& table, const std::string& val_var) {
    return {{"class", "col_itm"}, {"table", table}, {"val_var", val_var}};
}

json with(json item, const std::string& key, const std::string& value) {
    item[key] = value;
    return item;
}

json num_concept(const std::string& category, const std::string& description, const std::vector<std::string>& units,
                 double min, double max, json long_items, json wide_items) {
    return {{"class", "num_cncpt"},
            {"target", "ts_tbl"},
            {"category", category},
            {"description", description},
            {"unit", units},
            {"min", min},
            {"max", max},
            {"sources", {{"demo_long", std::move(long_items)}, {"demo_wide", std::move(wide_items)}}}};
}

json lab_concept(const std::string& description, const std::string& unit, double max,
                 const std::vector<std::int64_t>& itemids, const std::vector<std::string>& labnames) {
    json l = json::array({sel("labevents", "itemid", itemids)});
    json w = json::array({with(sel("lab", "labname", labnames), "val_var", "labresult")});
    return num_concept("laboratory", description, {unit}, 0, max, l, w);
}

}  // namespace

json demo_source_configs() { return json::array({long_config(), wide_config()}); }

json demo_dictionary() {
    json d;
    d["hr"] = num_concept("vital signs", "heart rate", {"bpm"}, 0, 300,
                          json::array({sel("chartevents", "itemid", {211, 220045})}),
                          json::array({col("vitalperiodic", "heartrate")}));
    d["temp"] = num_concept(
        "vital signs", "body temperature", {"C", "degC"}, 32, 44,
        json::array({with(sel("chartevents", "itemid", {676, 678, 223761, 223762}), "callback",
                          "convert_unit(fahr_to_cels, 'C', 'f')")}),
        json::array({col("vitalperiodic", "temperature")}));
    d["resp"] = num_concept("vital signs", "respiratory rate", {"insp/min"}, 0, 120,
                            json::array({sel("chartevents", "itemid", {618, 220210})}),
                            json::array({col("vitalperiodic", "respiration")}));
    d["fio2"] = num_concept(
        "respiratory", "fraction of inspired oxygen", {"%"}, 21, 100,
        json::array({with(sel("chartevents", "itemid", {223835}), "callback", "transform_fun(fraction_to_percent)")}),
        json::array({with(sel("lab", "labname", {"FiO2"}), "val_var", "labresult")}));
    d["glu"] = lab_concept("glucose", "mg/dL", 1000, {50809, 50931}, {"glucose", "bedside glucose"});
    d["glu"]["sources"]["demo_wide"] = json::array(
        {{{"class", "rgx_itm"}, {"table", "lab"}, {"sub_var", "labname"}, {"regex", "^(bedside )?glucose$"},
          {"val_var", "labresult"}}});
    d["alb"] = lab_concept("albumin", "g/dL", 10, {50862}, {"albumin"});
    d["wbc"] = lab_concept("white blood cell count", "K/uL", 1000, {51300, 51301}, {"WBC x 1000"});
    d["pao2"] = lab_concept("arterial partial pressure of oxygen", "mmHg", 800, {50821}, {"paO2"});
    d["pco2"] = lab_concept("arterial partial pressure of carbon dioxide", "mmHg", 250, {50818}, {"paCO2"});
    d["weight"] = num_concept("demographics", "patient weight", {"kg"}, 0, 500,
                              json::array({sel("chartevents", "itemid", {226512})}),
                              json::array({col("patient", "admissionweight")}));
    d["weight"]["target"] = "id_tbl";
    d["age"] = num_concept("demographics", "patient age", {"years"}, 0, 120,
                           json::array({{{"class", "fun_itm"}, {"table", "patients"}, {"fun", "age_at_stay()"}}}),
                           json::array({col("patient", "age")}));
    d["age"]["target"] = "id_tbl";
    d["sex"] = {{"class", "fct_cncpt"},
                {"target", "id_tbl"},
                {"category", "demographics"},
                {"description", "patient sex"},
                {"levels", {"Female", "Male"}},
                {"sources",
                 {{"demo_long",
                   json::array({with(col("patients", "gender"), "callback", "apply_map('M', 'Male', 'F', 'Female')")})},
                  {"demo_wide", json::array({col("patient", "gender")})}}}};
    d["abx"] = {{"class", "lgl_cncpt"},
                {"target", "ts_tbl"},
                {"category", "medications"},
                {"description", "antibiotics"},
                {"sources",
                 {{"demo_long",
                   json::array({{{"class", "rgx_itm"},
                                 {"table", "prescriptions"},
                                 {"sub_var", "drug"},
                                 {"regex", kAbxRegex},
                                 {"callback", "transform_fun(set_true)"}}})},
                  {"demo_wide",
                   json::array({{{"class", "rgx_itm"},
                                 {"table", "medication"},
                                 {"sub_var", "drugname"},
                                 {"regex", kAbxRegex},
                                 {"callback", "transform_fun(set_true)"}}})}}}};
    d["death"] = {{"class", "lgl_cncpt"},
                  {"target", "ts_tbl"},
                  {"category", "outcome"},
                  {"description", "in-hospital mortality"},
                  {"sources",
                   {{"demo_long",
                     json::array({{{"class", "col_itm"},
                                   {"table", "admissions"},
                                   {"val_var", "deathtime"},
                                   {"index_var", "deathtime"},
                                   {"callback", "transform_fun(set_true)"}}})},
                    {"demo_wide",
                     json::array({{{"class", "sel_itm"},
                                   {"table", "patient"},
                                   {"sub_var", "hospitaldischargestatus"},
                                   {"ids", {"Expired"}},
                                   {"val_var", "hospitaldischargestatus"},
                                   {"index_var", "hospitaldischargeoffset"},
                                   {"callback", "transform_fun(set_true)"}}})}}}};
    d["sirs"] = {{"class", "rec_cncpt"},
                 {"target", "ts_tbl"},
                 {"category", "outcome"},
                 {"description", "systemic inflammatory response syndrome score"},
                 {"concepts", {"temp", "hr", "resp", "pco2", "wbc"}},
                 {"callback", "sirs_score"}};
    d["pafi"] = {{"class", "rec_cncpt"},
                 {"target", "ts_tbl"},
                 {"category", "respiratory"},
                 {"description", "horowitz index"},
                 {"concepts", {"pao2", "fio2"}},
                 {"callback", "pafi_ratio"}};
    return d;
}

DemoSummary generate_demo(const DemoOptions& opts, const fs::path& out_dir) {
    if (opts.patients <= 0) throw Error(Errc::invalid_argument, "patient count must be positive");
    const fs::path long_dir = out_dir / "demo_long";
    const fs::path wide_dir = out_dir / "demo_wide";
    const fs::path cfg_dir = out_dir / "config";
    for (const auto& d : {long_dir, wide_dir, cfg_dir}) fs::create_directories(d);

    CsvOut patients(long_dir / "PATIENTS.csv", {"SUBJECT_ID", "GENDER", "DOB", "DOD"});
    CsvOut admissions(long_dir / "ADMISSIONS.csv", {"SUBJECT_ID", "HADM_ID", "ADMITTIME", "DISCHTIME", "DEATHTIME",
                                                    "ADMISSION_TYPE", "HOSPITAL_EXPIRE_FLAG"});
    CsvOut icustays(long_dir / "ICUSTAYS.csv", {"SUBJECT_ID", "HADM_ID", "ICUSTAY_ID", "INTIME", "OUTTIME"});
    CsvOut chart(long_dir / "CHARTEVENTS.csv", {"SUBJECT_ID", "HADM_ID", "ICUSTAY_ID", "ITEMID", "CHARTTIME", "VALUE",
                                                "VALUENUM", "VALUEUOM"});
    CsvOut labs(long_dir / "LABEVENTS.csv", {"SUBJECT_ID", "HADM_ID", "ITEMID", "CHARTTIME", "VALUENUM", "VALUEUOM"});
    CsvOut rx(long_dir / "PRESCRIPTIONS.csv", {"SUBJECT_ID", "HADM_ID", "STARTDATE", "DRUG"});
    CsvOut items(long_dir / "D_ITEMS.csv", {"ITEMID", "LABEL"});
    CsvOut patient(wide_dir / "patient.csv", {"patientunitstayid", "gender", "age", "admissionweight",
                                              "unitdischargeoffset", "hospitaldischargeoffset",
                                              "hospitaldischargestatus"});
    CsvOut vitals(wide_dir / "vitalperiodic.csv",
                  {"patientunitstayid", "observationoffset", "heartrate", "temperature", "respiration"});
    CsvOut lab(wide_dir / "lab.csv", {"patientunitstayid", "labresultoffset", "labname", "labresult"});
    CsvOut med(wide_dir / "medication.csv", {"patientunitstayid", "drugstartoffset", "drugname"});

    const std::vector<std::pair<std::int64_t, std::string>> item_labels = {
        {211, "Heart Rate"},        {618, "Respiratory Rate"},    {676, "Temperature C"},
        {678, "Temperature, F"},    {220045, "Heart Rate"},       {220210, "Respiratory Rate"},
        {223761, "Temperature, F"}, {223762, "Temperature C"},    {223835, "Inspired O2 Fraction"},
        {226512, "Admission Weight (Kg)"}};
    for (const auto& [id, label] : item_labels) items.row({num(id), label});

    const std::vector<std::string> abx = {"Vancomycin", "Piperacillin-Tazobactam", "Ceftriaxone", "Meropenem",
                                          "Ciprofloxacin", "Azithromycin"};
    const std::vector<std::string> other_drugs = {"Heparin", "Insulin", "Furosemide", "Pantoprazole"};

    Rng rng(opts.seed);
    const std::int64_t base = *parse_date("2101-01-01");
    std::int64_t next_hadm = 100001;
    std::int64_t next_stay = 200001;

    json gt_stays = json::array();
    json gt_orphans = json::array();
    json gt_injected = json::array();

    for (int p = 0; p < opts.patients; ++p) {
        const std::int64_t subject = 1001 + p;
        const bool male = rng.chance(0.5);
        const std::int64_t age_years = rng.uniform(20, 89);
        std::int64_t admit = base + rng.uniform(0, 365 * 70) * kDay + rng.uniform(0, 1439) * kMinute;
        const std::int64_t admit_day = admit - (admit - base) % kDay;
        const std::int64_t dob = admit_day - (age_years * 365 + rng.uniform(0, 364)) * kDay;
        const int n_adm = rng.chance(0.3) ? 2 : 1;
        std::optional<std::int64_t> dod;

        for (int a = 0; a < n_adm; ++a) {
            const std::int64_t hadm = next_hadm++;
            const std::int64_t pre = rng.uniform(60, 2880);
            const int n_icu = rng.chance(0.3) ? 2 : 1;
            const bool dies = a == n_adm - 1 && rng.chance(0.2);
            std::int64_t cur = admit + pre * kMinute;

            // Labs charted before the first ICU admission belong to no stay.
            const int pre_labs = static_cast<int>(rng.uniform(1, 2));
            for (int k = 0; k < pre_labs; ++k) {
                const std::int64_t at = admit + rng.uniform(0, pre - 1) * kMinute;
                const double v = static_cast<double>(rng.uniform(60, 300));
                labs.row({num(subject), num(hadm), "50931", ts(at), num(v), "mg/dL"});
                gt_orphans.push_back({{"hadm_id", hadm}, {"itemid", 50931}, {"charttime", ts(at)}});
            }

            std::int64_t last_out = cur;
            for (int s = 0; s < n_icu; ++s) {
                const std::int64_t stay = next_stay++;
                const std::int64_t len = rng.uniform(720, 4320);
                const std::int64_t intime = cur;
                const std::int64_t outtime = intime + len * kMinute;
                const bool death_here = dies && s == n_icu - 1;
                icustays.row({num(subject), num(hadm), num(stay), ts(intime), ts(outtime)});

                std::vector<Obs> obs;
                std::set<std::int64_t> used;

                const double weight = static_cast<double>(rng.uniform(450, 1200)) / 10.0;
                const std::int64_t w_off = rng.uniform(0, std::min<std::int64_t>(60, len - 1));
                chart.row({num(subject), num(hadm), num(stay), "226512", ts(intime + w_off * kMinute), num(weight),
                           num(weight), "kg"});

                std::vector<std::int64_t> spare;
                for (std::int64_t off = 0; off < len; off += 5) {
                    if (!rng.chance(0.3)) {
                        spare.push_back(off);
                        continue;
                    }
                    std::optional<double> hr, temp, resp;
                    if (rng.chance(0.9)) {
                        hr = static_cast<double>(rng.uniform(50, 140));
                        const std::int64_t item = rng.chance(0.5) ? 211 : 220045;
                        chart.row({num(subject), num(hadm), num(stay), num(item), ts(intime + off * kMinute), num(*hr),
                                   num(*hr), "bpm"});
                        obs.push_back({"hr", off, *hr});
                    }
                    if (rng.chance(0.4)) {
                        const bool fahrenheit = rng.chance(0.5);
                        const bool metavision = rng.chance(0.5);
                        if (fahrenheit) {
                            const double f = static_cast<double>(rng.uniform(950, 1030)) / 10.0;
                            temp = fahr_to_cels(f);
                            chart.row({num(subject), num(hadm), num(stay), metavision ? "223761" : "678",
                                       ts(intime + off * kMinute), num(f), num(f), "degF"});
                        } else {
                            temp = static_cast<double>(rng.uniform(350, 395)) / 10.0;
                            chart.row({num(subject), num(hadm), num(stay), metavision ? "223762" : "676",
                                       ts(intime + off * kMinute), num(*temp), num(*temp), "degC"});
                        }
                        obs.push_back({"temp", off, *temp});
                    }
                    if (rng.chance(0.7)) {
                        resp = static_cast<double>(rng.uniform(8, 40));
                        const std::int64_t item = rng.chance(0.5) ? 618 : 220210;
                        chart.row({num(subject), num(hadm), num(stay), num(item), ts(intime + off * kMinute),
                                   num(*resp), num(*resp), "insp/min"});
                        obs.push_back({"resp", off, *resp});
                    }
                    if (!hr && !temp && !resp) continue;
                    vitals.row({num(stay), num(off), hr ? num(*hr) : "", temp ? num(*temp) : "",
                                resp ? num(*resp) : ""});
                }

                // Implausible heart rates on otherwise empty grid points.
                if (!spare.empty() && rng.chance(0.4)) {
                    const std::int64_t off = rng.pick(spare);
                    const double v = rng.chance(0.5) ? 350.0 : -5.0;
                    chart.row({num(subject), num(hadm), num(stay), "220045", ts(intime + off * kMinute), num(v),
                               num(v), "bpm"});
                    vitals.row({num(stay), num(off), num(v), "", ""});
                    gt_injected.push_back({{"icustay_id", stay}, {"concept", "hr"}, {"offset", off}, {"value", v}});
                }

                const int n_fio2 = static_cast<int>(rng.uniform(1, 4));
                for (int k = 0; k < n_fio2; ++k) {
                    const std::int64_t off = rng.uniform(0, len - 1);
                    if (!used.insert(off).second) continue;
                    const double raw = rng.chance(0.4) ? static_cast<double>(rng.uniform(21, 100)) / 100.0
                                                       : static_cast<double>(rng.uniform(21, 100));
                    const double pct = fraction_to_percent(raw);
                    chart.row({num(subject), num(hadm), num(stay), "223835", ts(intime + off * kMinute), num(raw),
                               num(raw), "%"});
                    lab.row({num(stay), num(off), "FiO2", num(pct)});
                    obs.push_back({"fio2", off, pct});
                }

                std::vector<Lab> stay_labs;
                auto add_labs = [&](const std::string& concept_name, const std::string& unit,
                                    const std::vector<std::pair<std::int64_t, std::string>>& variants,
                                    std::int64_t lo, std::int64_t hi, double scale) {
                    const int n = static_cast<int>(rng.uniform(1, 3));
                    std::set<std::int64_t> offs;
                    for (int k = 0; k < n; ++k) {
                        const std::int64_t off = rng.uniform(0, len - 1);
                        if (!offs.insert(off).second) continue;
                        const auto& [itemid, name] = rng.pick(variants);
                        const double v = static_cast<double>(rng.uniform(lo, hi)) / scale;
                        stay_labs.push_back({itemid, name, concept_name, unit, off, v});
                    }
                };
                add_labs("glu", "mg/dL", {{50809, "bedside glucose"}, {50931, "glucose"}}, 60, 300, 1.0);
                add_labs("alb", "g/dL", {{50862, "albumin"}}, 15, 50, 10.0);
                add_labs("wbc", "K/uL", {{51300, "WBC x 1000"}, {51301, "WBC x 1000"}}, 20, 250, 10.0);
                add_labs("pao2", "mmHg", {{50821, "paO2"}}, 50, 400, 1.0);
                add_labs("pco2", "mmHg", {{50818, "paCO2"}}, 20, 70, 1.0);
                std::stable_sort(stay_labs.begin(), stay_labs.end(),
                                 [](const Lab& a, const Lab& b) { return a.offset < b.offset; });
                for (const auto& l : stay_labs) {
                    labs.row({num(subject), num(hadm), num(l.itemid), ts(intime + l.offset * kMinute), num(l.value),
                              l.unit});
                    lab.row({num(stay), num(l.offset), l.wide_name, num(l.value)});
                    obs.push_back({l.concept_name, l.offset, l.value});
                }

                // Prescriptions carry a date only; they count from noon.
                json abx_offsets = json::array();
                std::vector<std::int64_t> noons;
                for (std::int64_t day = intime - (intime - base) % kDay; day < outtime; day += kDay) {
                    const std::int64_t noon = day + kDay / 2;
                    if (noon >= intime && noon < outtime) noons.push_back(noon);
                }
                if (!noons.empty() && rng.chance(0.6)) {
                    const std::int64_t noon = rng.pick(noons);
                    const std::string& drug = rng.pick(abx);
                    rx.row({num(subject), num(hadm), format_date(noon - kDay / 2), drug});
                    med.row({num(stay), num((noon - intime) / kMinute), drug});
                    abx_offsets.push_back((noon - intime) / kMinute);
                }
                if (!noons.empty() && rng.chance(0.5)) {
                    const std::int64_t noon = rng.pick(noons);
                    const std::string& drug = rng.pick(other_drugs);
                    rx.row({num(subject), num(hadm), format_date(noon - kDay / 2), drug});
                    med.row({num(stay), num((noon - intime) / kMinute), drug});
                }

                const std::int64_t age_minutes = (intime - dob) / kMinute;
                const double age = static_cast<double>(age_minutes) / kMinutesPerYear;
                std::int64_t disch_off = 0;
                if (death_here) disch_off = len - 1;
                patient.row({num(stay), male ? "Male" : "Female", num(age), num(weight), num(len),
                             death_here ? num(disch_off) : "", death_here ? "Expired" : "Alive"});

                json gt_obs = json::array();
                for (const auto& o : obs) {
                    gt_obs.push_back({{"concept", o.concept_name}, {"offset", o.offset}, {"value", o.value}});
                }
                gt_stays.push_back({{"subject_id", subject},
                                    {"hadm_id", hadm},
                                    {"icustay_id", stay},
                                    {"intime", ts(intime)},
                                    {"outtime", ts(outtime)},
                                    {"length_min", len},
                                    {"age", age},
                                    {"sex", male ? "Male" : "Female"},
                                    {"weight", weight},
                                    {"death_offset", death_here ? json(len - 1) : json(nullptr)},
                                    {"abx_offsets", abx_offsets},
                                    {"observations", gt_obs}});

                last_out = outtime;
                if (s + 1 < n_icu) {
                    const std::int64_t gap = rng.uniform(360, 2880);
                    const std::int64_t at = outtime + rng.uniform(0, gap - 1) * kMinute;
                    const double v = static_cast<double>(rng.uniform(15, 50)) / 10.0;
                    labs.row({num(subject), num(hadm), "50862", ts(at), num(v), "g/dL"});
                    gt_orphans.push_back({{"hadm_id", hadm}, {"itemid", 50862}, {"charttime", ts(at)}});
                    cur = outtime + gap * kMinute;
                }
            }

            std::int64_t disch = last_out + rng.uniform(60, 2880) * kMinute;
            std::string deathtime;
            if (dies) {
                const std::int64_t at = last_out - kMinute;
                deathtime = ts(at);
                disch = last_out;
                dod = disch;
            }
            admissions.row({num(subject), num(hadm), ts(admit), ts(disch), deathtime,
                            rng.chance(0.7) ? "EMERGENCY" : "ELECTIVE", dies ? "1" : "0"});
            admit = disch + rng.uniform(30, 400) * kDay;
        }
        patients.row({num(subject), male ? "M" : "F", ts(dob), dod ? ts(*dod) : ""});
    }

    DemoSummary summary;
    summary.out_dir = out_dir;
    summary.rows = {{"demo_long/PATIENTS.csv", patients.rows()},   {"demo_long/ADMISSIONS.csv", admissions.rows()},
                    {"demo_long/ICUSTAYS.csv", icustays.rows()},   {"demo_long/CHARTEVENTS.csv", chart.rows()},
                    {"demo_long/LABEVENTS.csv", labs.rows()},      {"demo_long/PRESCRIPTIONS.csv", rx.rows()},
                    {"demo_long/D_ITEMS.csv", items.rows()},       {"demo_wide/patient.csv", patient.rows()},
                    {"demo_wide/vitalperiodic.csv", vitals.rows()}, {"demo_wide/lab.csv", lab.rows()},
                    {"demo_wide/medication.csv", med.rows()}};

    json gt;
    gt["seed"] = opts.seed;
    gt["patients"] = opts.patients;
    gt["stays"] = gt_stays;
    gt["orphan_labs"] = gt_orphans;
    gt["injected"] = gt_injected;
    json rows = json::object();
    for (const auto& [file, n] : summary.rows) rows[file] = n;
    gt["rows"] = rows;
    summary.ground_truth = gt;

    auto write_json = [](const fs::path& path, const json& j) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
        out << j.dump(2) << '\n';
    };
    write_json(cfg_dir / "data-sources.json", demo_source_configs());
    write_json(cfg_dir / "concept-dict.json", demo_dictionary());
    write_json(out_dir / "ground_truth.json", gt);
    return summary;
}

}  // namespace icuharm
