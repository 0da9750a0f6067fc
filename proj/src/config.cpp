#include "subh/config.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <variant>

namespace subh {

// A deliberately small TOML subset: [table] and [[array.of.tables]] headers,
// key = value lines, values limited to numbers, booleans, and (nested)
// arrays. That covers the whole config schema without an external parser.
namespace {

struct Value;
using Array = std::vector<Value>;
struct Value {
    std::variant<double, bool, Array> v;
    bool is_number() const { return std::holds_alternative<double>(v); }
    bool is_bool() const { return std::holds_alternative<bool>(v); }
    bool is_array() const { return std::holds_alternative<Array>(v); }
    double num() const { return std::get<double>(v); }
    bool boolean() const { return std::get<bool>(v); }
    const Array& arr() const { return std::get<Array>(v); }
};

using Table = std::map<std::string, Value>;

struct Document {
    std::map<std::string, Table> tables;          // [name]
    std::map<std::string, std::vector<Table>> table_arrays; // [[name]]
};

struct Parser {
    const std::string& text;
    std::size_t pos = 0;
    int line = 1;

    explicit Parser(const std::string& t) : text(t) {}

    [[noreturn]] void fail(const std::string& msg) const {
        std::ostringstream os;
        os << "config line " << line << ": " << msg;
        throw ConfigError(os.str());
    }

    bool eof() const { return pos >= text.size(); }
    char peek() const { return eof() ? '\0' : text[pos]; }
    char get() {
        char c = text[pos++];
        if (c == '\n') ++line;
        return c;
    }

    void skip_ws_inline() {
        while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos;
    }
    void skip_to_eol() {
        while (!eof() && peek() != '\n') ++pos;
    }
    void skip_blank_and_comments() {
        for (;;) {
            skip_ws_inline();
            if (eof()) return;
            char c = peek();
            if (c == '#') { skip_to_eol(); continue; }
            if (c == '\n' || c == '\r') { get(); continue; }
            return;
        }
    }

    std::string parse_key() {
        skip_ws_inline();
        std::string k;
        while (!eof() && (std::isalnum((unsigned char)peek()) || peek() == '_' || peek() == '.'))
            k.push_back(get());
        if (k.empty()) fail("expected a key");
        return k;
    }

    Value parse_value() {
        skip_ws_inline();
        if (eof()) fail("expected a value");
        char c = peek();
        if (c == '[') {
            get();
            Array a;
            skip_blank_and_comments();
            if (peek() == ']') { get(); return Value{a}; }
            for (;;) {
                skip_blank_and_comments();
                a.push_back(parse_value());
                skip_blank_and_comments();
                char d = eof() ? '\0' : get();
                if (d == ',') continue;
                if (d == ']') break;
                fail("expected ',' or ']' in array");
            }
            return Value{std::move(a)};
        }
        if (std::isalpha((unsigned char)c)) {
            std::string w;
            while (!eof() && std::isalpha((unsigned char)peek())) w.push_back(get());
            if (w == "true") return Value{true};
            if (w == "false") return Value{false};
            fail("unknown literal '" + w + "'");
        }
        // number
        std::string n;
        while (!eof() && (std::isdigit((unsigned char)peek()) || peek() == '+' || peek() == '-' ||
                          peek() == '.' || peek() == 'e' || peek() == 'E'))
            n.push_back(get());
        if (n.empty()) fail("expected a number");
        try {
            std::size_t used = 0;
            double d = std::stod(n, &used);
            if (used != n.size()) fail("malformed number '" + n + "'");
            return Value{d};
        } catch (const std::exception&) {
            fail("malformed number '" + n + "'");
        }
    }

    Document parse() {
        Document doc;
        Table* current = nullptr;
        for (;;) {
            skip_blank_and_comments();
            if (eof()) break;
            if (peek() == '[') {
                get();
                bool array_header = peek() == '[';
                if (array_header) get();
                skip_ws_inline();
                std::string name = parse_key();
                skip_ws_inline();
                if (get() != ']') fail("unterminated table header");
                if (array_header && get() != ']') fail("unterminated table array header");
                skip_ws_inline();
                if (!eof() && peek() != '\n' && peek() != '#')
                    fail("trailing characters after table header");
                if (array_header) {
                    doc.table_arrays[name].push_back({});
                    current = &doc.table_arrays[name].back();
                } else {
                    if (doc.tables.count(name)) fail("table [" + name + "] appears twice");
                    current = &doc.tables[name];
                }
                continue;
            }
            std::string key = parse_key();
            skip_ws_inline();
            if (eof() || get() != '=') fail("expected '=' after key '" + key + "'");
            Value v = parse_value();
            skip_ws_inline();
            if (!eof() && peek() == '#') skip_to_eol();
            skip_ws_inline();
            if (!eof() && peek() != '\n' && peek() != '\r')
                fail("trailing characters after value for '" + key + "'");
            if (!current) fail("key '" + key + "' outside any table");
            if (current->count(key)) fail("key '" + key + "' appears twice in one table");
            (*current)[key] = std::move(v);
        }
        return doc;
    }
};

double want_number(const Table& t, const std::string& key, const std::string& where) {
    auto it = t.find(key);
    if (it == t.end()) throw ConfigError(where + " is missing key '" + key + "'");
    if (!it->second.is_number()) throw ConfigError(where + " key '" + key + "' must be a number");
    return it->second.num();
}

int want_int(const Table& t, const std::string& key, const std::string& where) {
    double d = want_number(t, key, where);
    int i = int(d);
    if (double(i) != d) throw ConfigError(where + " key '" + key + "' must be an integer");
    return i;
}

std::vector<double> want_number_array(const Value& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v.arr()) {
        if (!e.is_number()) throw ConfigError(where + " must be an array of numbers");
        out.push_back(e.num());
    }
    return out;
}

std::vector<Mode> parse_mode_list(const Document& doc, const std::string& name) {
    std::vector<Mode> modes;
    auto it = doc.table_arrays.find(name);
    if (it == doc.table_arrays.end()) return modes;
    for (std::size_t i = 0; i < it->second.size(); ++i) {
        const Table& t = it->second[i];
        std::ostringstream whereos;
        whereos << "[[" << name << "]] entry " << i + 1;
        std::string where = whereos.str();
        Mode m;
        m.nu0 = want_int(t, "nu", where);
        m.sigma0 = want_int(t, "sigma", where);
        auto ct = t.find("coeff");
        if (ct == t.end()) throw ConfigError(where + " is missing key 'coeff'");
        if (!ct->second.is_array()) throw ConfigError(where + " key 'coeff' must be an array");
        std::vector<PolyTerm> terms;
        for (const auto& entry : ct->second.arr()) {
            auto nums = want_number_array(entry, where + " coeff entry");
            if (nums.size() != 4)
                throw ConfigError(where + " coeff entries must be [degA, degC, re, im]");
            PolyTerm pt;
            pt.degA = int(nums[0]);
            pt.degC = int(nums[1]);
            if (double(pt.degA) != nums[0] || double(pt.degC) != nums[1] || pt.degA < 0 ||
                pt.degC < 0)
                throw ConfigError(where + " coeff degrees must be nonnegative integers");
            pt.coeff = cplx(nums[2], nums[3]);
            terms.push_back(pt);
        }
        m.poly = BivarPoly(std::move(terms));
        for (const auto& [key, v] : t) {
            (void)v;
            if (key != "nu" && key != "sigma" && key != "coeff")
                throw ConfigError(where + " has unknown key '" + key + "'");
        }
        modes.push_back(std::move(m));
    }
    return modes;
}

std::vector<MechMode> parse_mech_modes(const Document& doc) {
    std::vector<MechMode> modes;
    auto it = doc.table_arrays.find("mechanical.f_modes");
    if (it == doc.table_arrays.end()) return modes;
    for (std::size_t i = 0; i < it->second.size(); ++i) {
        const Table& t = it->second[i];
        std::ostringstream whereos;
        whereos << "[[mechanical.f_modes]] entry " << i + 1;
        std::string where = whereos.str();
        MechMode m;
        m.sigma = want_int(t, "sigma", where);
        auto ct = t.find("coeff_x");
        if (ct == t.end()) throw ConfigError(where + " is missing key 'coeff_x'");
        auto re = want_number_array(ct->second, where + " coeff_x");
        std::vector<double> im(re.size(), 0.0);
        auto imt = t.find("coeff_x_im");
        if (imt != t.end()) {
            im = want_number_array(imt->second, where + " coeff_x_im");
            if (im.size() != re.size())
                throw ConfigError(where + " coeff_x_im length differs from coeff_x");
        }
        for (std::size_t j = 0; j < re.size(); ++j) m.coeff.push_back(cplx(re[j], im[j]));
        for (const auto& [key, v] : t) {
            (void)v;
            if (key != "sigma" && key != "coeff_x" && key != "coeff_x_im")
                throw ConfigError(where + " has unknown key '" + key + "'");
        }
        modes.push_back(std::move(m));
    }
    return modes;
}

} // namespace

ParsedConfig parse_config_text(const std::string& text) {
    Parser parser(text);
    Document doc = parser.parse();

    for (const auto& [name, t] : doc.tables) {
        (void)t;
        if (name != "system" && name != "mechanical")
            throw ConfigError("unknown table [" + name + "]");
    }
    for (const auto& [name, ts] : doc.table_arrays) {
        (void)ts;
        if (name != "F.modes" && name != "G.modes" && name != "mechanical.f_modes")
            throw ConfigError("unknown table array [[" + name + "]]");
    }

    ParsedConfig out;

    auto sys_it = doc.tables.find("system");
    bool has_trig_modes =
        doc.table_arrays.count("F.modes") || doc.table_arrays.count("G.modes");
    if (sys_it != doc.tables.end() || has_trig_modes) {
        if (sys_it == doc.tables.end())
            throw ConfigError("mode tables present but [system] is missing");
        const Table& st = sys_it->second;
        auto ot = st.find("omega");
        if (ot == st.end()) throw ConfigError("[system] is missing key 'omega'");
        RealPoly omega(want_number_array(ot->second, "[system] omega"));
        bool realify = true;
        auto rt = st.find("realify");
        if (rt != st.end()) {
            if (!rt->second.is_bool()) throw ConfigError("[system] realify must be a boolean");
            realify = rt->second.boolean();
        }
        for (const auto& [key, v] : st) {
            (void)v;
            if (key != "omega" && key != "realify")
                throw ConfigError("[system] has unknown key '" + key + "'");
        }
        out.trig.emplace(std::move(omega), parse_mode_list(doc, "F.modes"),
                         parse_mode_list(doc, "G.modes"), realify);
    }

    auto mech_it = doc.tables.find("mechanical");
    bool has_mech_modes = doc.table_arrays.count("mechanical.f_modes");
    if (mech_it != doc.tables.end() || has_mech_modes) {
        if (mech_it == doc.tables.end())
            throw ConfigError("mechanical mode tables present but [mechanical] is missing");
        const Table& mt = mech_it->second;
        auto gt = mt.find("g");
        if (gt == mt.end()) throw ConfigError("[mechanical] is missing key 'g'");
        RealPoly g(want_number_array(gt->second, "[mechanical] g"));
        bool realify = true;
        auto rt = mt.find("realify");
        if (rt != mt.end()) {
            if (!rt->second.is_bool()) throw ConfigError("[mechanical] realify must be a boolean");
            realify = rt->second.boolean();
        }
        for (const auto& [key, v] : mt) {
            (void)v;
            if (key != "g" && key != "realify")
                throw ConfigError("[mechanical] has unknown key '" + key + "'");
        }
        out.mechanical.emplace(std::move(g), parse_mech_modes(doc), realify);
    }

    if (!out.trig && !out.mechanical)
        throw ConfigError("config defines neither [system] nor [mechanical]");
    return out;
}

ParsedConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

TrigSystem parse_system_file(const std::string& path) {
    ParsedConfig cfg = parse_config_file(path);
    if (!cfg.trig) throw ConfigError("config has no [system] section: " + path);
    return *cfg.trig;
}

MechanicalSystem parse_mechanical_file(const std::string& path) {
    ParsedConfig cfg = parse_config_file(path);
    if (!cfg.mechanical) throw ConfigError("config has no [mechanical] section: " + path);
    return *cfg.mechanical;
}

} // namespace subh
