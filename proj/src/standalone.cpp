#include "provlock/standalone.hpp"

#include <algorithm>
#include <map>

#include "provlock/parallel.hpp"

namespace provlock {

namespace {

// Depth-first completion of the module table, one row at a time.
class StandaloneSearch {
public:
    StandaloneSearch(const ModuleTable& m, AttrSet H, const std::function<bool(const Relation&)>& visit)
        : m_(m), visit_(visit) {
        world_ = m.relation();
        const auto attrs = m.attrs();
        for (std::size_t k = 0; k < attrs.size(); ++k) {
            if (!H.contains(attrs[k])) continue;
            hidden_.push_back(k);
            radix_.push_back(k < m.inputs.size() ? m.input_radix[k] : m.output_radix[k - m.inputs.size()]);
        }
    }

    std::size_t run() {
        row(0);
        return count_;
    }

private:
    bool row(std::size_t r) {
        if (r == world_.rows.size()) {
            ++count_;
            return visit_(world_);
        }
        return cell(r, 0);
    }

    bool cell(std::size_t r, std::size_t h) {
        Row& t = world_.rows[r];
        if (h == hidden_.size()) {
            for (std::size_t k = 0; k < r; ++k)
                if (world_.rows[k] == t) return true;
            const std::size_t n_in = m_.inputs.size();
            Row x(t.begin(), t.begin() + n_in);
            Row y(t.begin() + n_in, t.end());
            auto it = fd_.find(x);
            if (it != fd_.end()) {
                if (it->second.first != y) return true;
                ++it->second.second;
                bool go = row(r + 1);
                --it->second.second;
                return go;
            }
            it = fd_.emplace(std::move(x), std::make_pair(std::move(y), 1)).first;
            bool go = row(r + 1);
            fd_.erase(it);
            return go;
        }
        const int saved = t[hidden_[h]];
        for (int v = 0; v < radix_[h]; ++v) {
            t[hidden_[h]] = v;
            if (!cell(r, h + 1)) {
                t[hidden_[h]] = saved;
                return false;
            }
        }
        t[hidden_[h]] = saved;
        return true;
    }

    const ModuleTable& m_;
    const std::function<bool(const Relation&)>& visit_;
    Relation world_;
    std::vector<std::size_t> hidden_;
    std::vector<int> radix_;
    std::map<Row, std::pair<Row, int>> fd_;  // input -> (output, rows using it)
    std::size_t count_ = 0;
};

}  // namespace

std::size_t standalone_worlds(const ModuleTable& m, AttrSet H, const std::function<bool(const Relation&)>& visit) {
    return StandaloneSearch(m, H, visit).run();
}

std::vector<std::set<Row>> standalone_out_all(const ModuleTable& m, AttrSet H) {
    std::vector<std::set<Row>> out(m.input_count());
    const std::size_t n_in = m.inputs.size();

    if (H.subset_of(m.output_set())) {
        // Inputs stay visible, so each row's hidden outputs range freely.
        for (std::size_t c = 0; c < m.input_count(); ++c) {
            std::vector<Row> partial{m.table[c]};
            for (std::size_t k = 0; k < m.outputs.size(); ++k) {
                if (!H.contains(m.outputs[k])) continue;
                std::vector<Row> next;
                for (const Row& y : partial)
                    for (int v = 0; v < m.output_radix[k]; ++v) {
                        Row z = y;
                        z[k] = v;
                        next.push_back(std::move(z));
                    }
                partial = std::move(next);
            }
            out[c].insert(partial.begin(), partial.end());
        }
        return out;
    }

    standalone_worlds(m, H, [&](const Relation& world) {
        for (const Row& t : world.rows) {
            Row x(t.begin(), t.begin() + n_in);
            out[m.encode_input(x)].emplace(t.begin() + n_in, t.end());
        }
        return true;
    });
    return out;
}

std::set<Row> standalone_out(const ModuleTable& m, const Row& x, AttrSet H) {
    if (x.size() != m.inputs.size())
        throw Error("InputNotInRelation", "input tuple has the wrong arity for module " + m.name);
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] < 0 || x[i] >= m.input_radix[i])
            throw Error("InputNotInRelation", "input value outside the domain of module " + m.name);
    return standalone_out_all(m, H)[m.encode_input(x)];
}

bool is_standalone_safe(const ModuleTable& m, AttrSet H, int gamma) {
    if (gamma <= 1) return true;
    if (H.subset_of(m.output_set())) {
        long long n = 1;
        for (std::size_t k = 0; k < m.outputs.size(); ++k)
            if (H.contains(m.outputs[k])) n *= m.output_radix[k];
        return n >= gamma;
    }
    for (const auto& s : standalone_out_all(m, H))
        if (static_cast<int>(s.size()) < gamma) return false;
    return true;
}

SafeCatalog enumerate_safe_subsets(const Workflow& w, int module, int gamma, bool outputs_only, int jobs) {
    const ModuleTable& m = w.modules[module];
    const auto universe = outputs_only ? m.outputs : m.attrs();
    std::vector<AttrSet> candidates;
    for_each_subset(universe, [&](AttrSet s) { candidates.push_back(s); });

    std::vector<char> ok(candidates.size(), 0);
    parallel_for(candidates.size(), jobs, [&](std::size_t i) { ok[i] = is_standalone_safe(m, candidates[i], gamma); });

    SafeCatalog cat{module, gamma, outputs_only, {}};
    for (std::size_t i = 0; i < candidates.size(); ++i)
        if (ok[i]) cat.subsets.push_back(candidates[i]);
    std::sort(cat.subsets.begin(), cat.subsets.end(), lex_less);
    return cat;
}

}  // namespace provlock
