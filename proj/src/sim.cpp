#include "qforge/sim.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <stdexcept>

namespace qforge {

std::vector<uint32_t> ShotBatch::detector_ones(uint32_t shot) const {
    std::vector<uint32_t> out;
    const uint64_t* row = det_bits.data() + shot * det_stride;
    for (size_t w = 0; w < det_stride; ++w) {
        uint64_t bits = row[w];
        while (bits) {
            out.push_back(static_cast<uint32_t>(w * 64 + std::countr_zero(bits)));
            bits &= bits - 1;
        }
    }
    return out;
}

void ShotBatch::write_b8(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    size_t bytes_per_shot = (n_detectors + 7) / 8;
    for (uint32_t s = 0; s < shots; ++s) {
        const uint8_t* row = reinterpret_cast<const uint8_t*>(det_bits.data() + s * det_stride);
        out.write(reinterpret_cast<const char*>(row), static_cast<std::streamsize>(bytes_per_shot));
    }
}

void ShotBatch::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    for (uint32_t s = 0; s < shots; ++s) {
        for (uint32_t d = 0; d < n_detectors; ++d) {
            if (d) out << ',';
            out << (det(s, d) ? 1 : 0);
        }
        out << '\n';
    }
}

ShotBatch ShotBatch::read_b8(const std::string& path, uint32_t n_detectors) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    size_t bytes_per_shot = (n_detectors + 7) / 8;
    if (bytes_per_shot == 0 || bytes.size() % bytes_per_shot != 0)
        throw std::runtime_error("b8 file size does not match detector count");
    ShotBatch b;
    b.shots = static_cast<uint32_t>(bytes.size() / bytes_per_shot);
    b.n_detectors = n_detectors;
    b.det_stride = (n_detectors + 63) / 64;
    b.det_bits.assign(b.shots * b.det_stride, 0);
    for (uint32_t s = 0; s < b.shots; ++s) {
        uint8_t* row = reinterpret_cast<uint8_t*>(b.det_bits.data() + s * b.det_stride);
        std::copy(bytes.begin() + s * bytes_per_shot, bytes.begin() + (s + 1) * bytes_per_shot, row);
    }
    b.obs_stride = 1;
    b.obs_bits.assign(b.shots, 0);
    return b;
}

RecordRefs record_refs(const Circuit& c) {
    RecordRefs refs;
    refs.observables.resize(c.n_observables());
    int64_t records = 0;
    for (const auto& inst : c.instructions) {
        if (inst.op == Op::MeasureZ || inst.op == Op::MeasureX) {
            records += static_cast<int64_t>(inst.targets.size());
        } else if (inst.op == Op::Detector) {
            std::vector<uint32_t> abs;
            for (int32_t off : inst.targets) abs.push_back(static_cast<uint32_t>(records + off));
            refs.detectors.push_back(std::move(abs));
        } else if (inst.op == Op::Observable) {
            for (int32_t off : inst.targets)
                refs.observables[inst.id].push_back(static_cast<uint32_t>(records + off));
        }
    }
    refs.n_records = static_cast<uint32_t>(records);
    return refs;
}

std::vector<NoiseSite> noise_sites(const Circuit& c) {
    std::vector<NoiseSite> sites;
    bool flip_pending = false;
    for (size_t i = 0; i < c.instructions.size(); ++i) {
        const auto& inst = c.instructions[i];
        switch (inst.op) {
            case Op::Depol1:
                for (uint32_t t = 0; t < inst.targets.size(); ++t) sites.push_back({i, t, Op::Depol1});
                break;
            case Op::Depol2:
                for (uint32_t p = 0; p * 2 < inst.targets.size(); ++p) sites.push_back({i, p, Op::Depol2});
                break;
            case Op::FlipMeas:
                flip_pending = true;
                break;
            case Op::MeasureZ:
            case Op::MeasureX:
                if (flip_pending) {
                    for (uint32_t t = 0; t < inst.targets.size(); ++t) sites.push_back({i, t, Op::FlipMeas});
                    flip_pending = false;
                }
                break;
            default:
                break;
        }
    }
    return sites;
}

namespace {

// Shared frame-propagation walk, 64 shots per word. When `forced` is set all
// random draws are disabled and exactly that fault is applied.
struct ForcedFault {
    uint32_t site;
    uint32_t pauli;
};

void run_frame_block(const Circuit& c, uint64_t seed, uint64_t shot_base, uint32_t live_shots,
                     const ForcedFault* forced, std::vector<uint64_t>& x_mask,
                     std::vector<uint64_t>& z_mask, std::vector<uint64_t>& rec) {
    std::fill(x_mask.begin(), x_mask.end(), 0);
    std::fill(z_mask.begin(), z_mask.end(), 0);
    uint32_t site = 0;
    double flip_p = -1.0;
    size_t r = 0;

    auto draw_depol1 = [&](uint32_t q, double p) {
        uint64_t mx = 0, mz = 0;
        if (forced) {
            if (forced->site == site) {
                if (forced->pauli & 1) mx = 1;
                if (forced->pauli & 2) mz = 1;
            }
        } else {
            for (uint32_t s = 0; s < live_shots; ++s) {
                double u = site_uniform(seed, shot_base + s, site);
                if (u < p) {
                    int choice = static_cast<int>(u / p * 3.0);  // 0: X, 1: Y, 2: Z
                    if (choice > 2) choice = 2;
                    if (choice != 2) mx |= uint64_t(1) << s;
                    if (choice != 0) mz |= uint64_t(1) << s;
                }
            }
        }
        x_mask[q] ^= mx;
        z_mask[q] ^= mz;
        ++site;
    };

    for (size_t i = 0; i < c.instructions.size(); ++i) {
        const auto& inst = c.instructions[i];
        switch (inst.op) {
            case Op::ResetZ:
            case Op::ResetX:
                for (int32_t q : inst.targets) {
                    x_mask[q] = 0;
                    z_mask[q] = 0;
                }
                break;
            case Op::H:
                for (int32_t q : inst.targets) std::swap(x_mask[q], z_mask[q]);
                break;
            case Op::Cnot:
                for (size_t t = 0; t + 1 < inst.targets.size(); t += 2) {
                    int32_t ctrl = inst.targets[t], tgt = inst.targets[t + 1];
                    x_mask[tgt] ^= x_mask[ctrl];
                    z_mask[ctrl] ^= z_mask[tgt];
                }
                break;
            case Op::Cz:
                for (size_t t = 0; t + 1 < inst.targets.size(); t += 2) {
                    int32_t a = inst.targets[t], b = inst.targets[t + 1];
                    z_mask[b] ^= x_mask[a];
                    z_mask[a] ^= x_mask[b];
                }
                break;
            case Op::Depol1:
                for (int32_t q : inst.targets) draw_depol1(static_cast<uint32_t>(q), inst.param);
                break;
            case Op::Depol2:
                for (size_t t = 0; t + 1 < inst.targets.size(); t += 2) {
                    int32_t a = inst.targets[t], b = inst.targets[t + 1];
                    uint64_t xa = 0, za = 0, xb = 0, zb = 0;
                    if (forced) {
                        if (forced->site == site) {
                            if (forced->pauli & 1) xa = 1;
                            if (forced->pauli & 2) za = 1;
                            if (forced->pauli & 4) xb = 1;
                            if (forced->pauli & 8) zb = 1;
                        }
                    } else {
                        for (uint32_t s = 0; s < live_shots; ++s) {
                            double u = site_uniform(seed, shot_base + s, site);
                            if (u < inst.param) {
                                int mask = static_cast<int>(u / inst.param * 15.0) + 1;
                                if (mask > 15) mask = 15;
                                uint64_t bit = uint64_t(1) << s;
                                if (mask & 1) xa |= bit;
                                if (mask & 2) za |= bit;
                                if (mask & 4) xb |= bit;
                                if (mask & 8) zb |= bit;
                            }
                        }
                    }
                    x_mask[a] ^= xa;
                    z_mask[a] ^= za;
                    x_mask[b] ^= xb;
                    z_mask[b] ^= zb;
                    ++site;
                }
                break;
            case Op::FlipMeas:
                flip_p = inst.param;
                break;
            case Op::MeasureZ:
            case Op::MeasureX: {
                bool is_z = inst.op == Op::MeasureZ;
                for (int32_t q : inst.targets) {
                    uint64_t word = is_z ? x_mask[q] : z_mask[q];
                    if (flip_p >= 0) {
                        if (forced) {
                            if (forced->site == site) word ^= 1;
                        } else {
                            for (uint32_t s = 0; s < live_shots; ++s)
                                if (site_uniform(seed, shot_base + s, site) < flip_p) word ^= uint64_t(1) << s;
                        }
                        ++site;
                    }
                    rec[r++] = word;
                    if (is_z)
                        z_mask[q] = 0;
                    else
                        x_mask[q] = 0;
                }
                flip_p = -1.0;
                break;
            }
            default:
                break;
        }
    }
}

}  // namespace

ShotBatch sample(const Circuit& c, uint32_t shots, uint64_t seed) {
    RecordRefs refs = record_refs(c);
    ShotBatch batch;
    batch.shots = shots;
    batch.seed = seed;
    batch.n_detectors = c.n_detectors();
    batch.n_observables = c.n_observables();
    batch.det_stride = (batch.n_detectors + 63) / 64;
    batch.obs_stride = (batch.n_observables + 63) / 64;
    batch.det_bits.assign(size_t(shots) * batch.det_stride, 0);
    batch.obs_bits.assign(size_t(shots) * batch.obs_stride, 0);

    std::vector<uint64_t> x_mask(c.n_qubits), z_mask(c.n_qubits), rec(refs.n_records);
    for (uint64_t base = 0; base < shots; base += 64) {
        uint32_t live = static_cast<uint32_t>(std::min<uint64_t>(64, shots - base));
        run_frame_block(c, seed, base, live, nullptr, x_mask, z_mask, rec);
        for (uint32_t d = 0; d < batch.n_detectors; ++d) {
            uint64_t word = 0;
            for (uint32_t idx : refs.detectors[d]) word ^= rec[idx];
            if (!word) continue;
            for (uint32_t s = 0; s < live; ++s)
                if ((word >> s) & 1)
                    batch.det_bits[(base + s) * batch.det_stride + (d >> 6)] |= uint64_t(1) << (d & 63);
        }
        for (uint32_t o = 0; o < batch.n_observables; ++o) {
            uint64_t word = 0;
            for (uint32_t idx : refs.observables[o]) word ^= rec[idx];
            if (!word) continue;
            for (uint32_t s = 0; s < live; ++s)
                if ((word >> s) & 1)
                    batch.obs_bits[(base + s) * batch.obs_stride + (o >> 6)] |= uint64_t(1) << (o & 63);
        }
    }
    return batch;
}

FaultEffect inject(const Circuit& c, size_t site_index, uint32_t pauli) {
    auto sites = noise_sites(c);
    if (site_index >= sites.size()) throw std::invalid_argument("noise site index out of range");
    const NoiseSite& s = sites[site_index];
    if (s.kind == Op::Depol1 && (pauli < 1 || pauli > 3))
        throw std::invalid_argument("Depol1 pauli must be 1..3");
    if (s.kind == Op::Depol2 && (pauli < 1 || pauli > 15))
        throw std::invalid_argument("Depol2 pauli must be 1..15");

    RecordRefs refs = record_refs(c);
    std::vector<uint64_t> x_mask(c.n_qubits), z_mask(c.n_qubits), rec(refs.n_records);
    ForcedFault forced{static_cast<uint32_t>(site_index), pauli};
    run_frame_block(c, 0, 0, 1, &forced, x_mask, z_mask, rec);

    FaultEffect effect;
    for (uint32_t d = 0; d < refs.detectors.size(); ++d) {
        uint64_t v = 0;
        for (uint32_t idx : refs.detectors[d]) v ^= rec[idx];
        if (v & 1) effect.detectors.push_back(d);
    }
    for (uint32_t o = 0; o < refs.observables.size(); ++o) {
        uint64_t v = 0;
        for (uint32_t idx : refs.observables[o]) v ^= rec[idx];
        if (v & 1) effect.observables.push_back(o);
    }
    return effect;
}

namespace {

// Sorted symmetric difference, the workhorse of symbolic fault propagation.
void xor_merge(std::vector<uint32_t>& dst, const std::vector<uint32_t>& src) {
    if (src.empty()) return;
    std::vector<uint32_t> out;
    out.reserve(dst.size() + src.size());
    size_t i = 0, j = 0;
    while (i < dst.size() && j < src.size()) {
        if (dst[i] < src[j])
            out.push_back(dst[i++]);
        else if (src[j] < dst[i])
            out.push_back(src[j++]);
        else {
            ++i;
            ++j;
        }
    }
    out.insert(out.end(), dst.begin() + i, dst.end());
    out.insert(out.end(), src.begin() + j, src.end());
    dst = std::move(out);
}

}  // namespace

std::vector<FaultColumn> analyze_faults(const Circuit& c, const std::vector<VirtualDepol>& virtuals) {
    RecordRefs refs = record_refs(c);

    // Virtual residual entries indexed by the instruction where they fire.
    std::vector<std::vector<std::pair<uint32_t, double>>> virtual_at(c.instructions.size() + 1);
    for (const auto& v : virtuals) {
        if (v.cycle >= c.cycle_starts.size()) throw std::invalid_argument("virtual depol cycle out of range");
        virtual_at[c.cycle_starts[v.cycle]].emplace_back(v.qubit, v.prior);
    }

    std::vector<FaultColumn> faults;
    std::vector<std::vector<uint32_t>> fx(c.n_qubits), fz(c.n_qubits);
    std::vector<std::vector<uint32_t>> rec_faults(refs.n_records);

    auto cycle_of_inst = [&](size_t i) {
        auto it = std::upper_bound(c.cycle_starts.begin(), c.cycle_starts.end(), i);
        return static_cast<int32_t>(it - c.cycle_starts.begin()) - 1;
    };

    uint32_t site = 0;
    double flip_p = -1.0;
    size_t r = 0;
    auto new_fault = [&](double prior, int32_t cycle, uint8_t component, uint32_t qubit,
                         bool is_virtual = false) {
        FaultColumn col;
        col.prior = prior;
        col.cycle = cycle;
        col.site = is_virtual ? UINT32_MAX : site;
        col.qubit = qubit;
        col.component = component;
        faults.push_back(std::move(col));
        return static_cast<uint32_t>(faults.size() - 1);
    };

    for (size_t i = 0; i <= c.instructions.size(); ++i) {
        for (auto [q, prior] : virtual_at[i]) {
            int32_t cyc = i < c.instructions.size() ? cycle_of_inst(i) : static_cast<int32_t>(c.n_cycles()) - 1;
            uint32_t fxid = new_fault(prior, cyc, 0, q, true);
            xor_merge(fx[q], {fxid});
            uint32_t fzid = new_fault(prior, cyc, 1, q, true);
            xor_merge(fz[q], {fzid});
        }
        if (i == c.instructions.size()) break;
        const auto& inst = c.instructions[i];
        int32_t cyc = cycle_of_inst(i);
        switch (inst.op) {
            case Op::ResetZ:
            case Op::ResetX:
                for (int32_t q : inst.targets) {
                    fx[q].clear();
                    fz[q].clear();
                }
                break;
            case Op::H:
                for (int32_t q : inst.targets) std::swap(fx[q], fz[q]);
                break;
            case Op::Cnot:
                for (size_t t = 0; t + 1 < inst.targets.size(); t += 2) {
                    int32_t ctrl = inst.targets[t], tgt = inst.targets[t + 1];
                    xor_merge(fx[tgt], fx[ctrl]);
                    xor_merge(fz[ctrl], fz[tgt]);
                }
                break;
            case Op::Cz:
                for (size_t t = 0; t + 1 < inst.targets.size(); t += 2) {
                    int32_t a = inst.targets[t], b = inst.targets[t + 1];
                    xor_merge(fz[b], fx[a]);
                    xor_merge(fz[a], fx[b]);
                }
                break;
            case Op::Depol1:
                for (int32_t q : inst.targets) {
                    double p = inst.param * 2.0 / 3.0;
                    xor_merge(fx[q], {new_fault(p, cyc, 0, static_cast<uint32_t>(q))});
                    xor_merge(fz[q], {new_fault(p, cyc, 1, static_cast<uint32_t>(q))});
                    ++site;
                }
                break;
            case Op::Depol2:
                for (size_t t = 0; t + 1 < inst.targets.size(); t += 2) {
                    int32_t a = inst.targets[t], b = inst.targets[t + 1];
                    double p = inst.param * 8.0 / 15.0;
                    xor_merge(fx[a], {new_fault(p, cyc, 0, static_cast<uint32_t>(a))});
                    xor_merge(fz[a], {new_fault(p, cyc, 1, static_cast<uint32_t>(a))});
                    xor_merge(fx[b], {new_fault(p, cyc, 0, static_cast<uint32_t>(b))});
                    xor_merge(fz[b], {new_fault(p, cyc, 1, static_cast<uint32_t>(b))});
                    ++site;
                }
                break;
            case Op::FlipMeas:
                flip_p = inst.param;
                break;
            case Op::MeasureZ:
            case Op::MeasureX: {
                bool is_z = inst.op == Op::MeasureZ;
                for (int32_t q : inst.targets) {
                    rec_faults[r] = is_z ? fx[q] : fz[q];
                    if (flip_p >= 0) {
                        xor_merge(rec_faults[r], {new_fault(flip_p, cyc, 2, static_cast<uint32_t>(r))});
                        ++site;
                    }
                    ++r;
                    if (is_z)
                        fz[q].clear();
                    else
                        fx[q].clear();
                }
                flip_p = -1.0;
                break;
            }
            default:
                break;
        }
    }

    for (uint32_t d = 0; d < refs.detectors.size(); ++d) {
        std::vector<uint32_t> acc;
        for (uint32_t idx : refs.detectors[d]) xor_merge(acc, rec_faults[idx]);
        for (uint32_t f : acc) faults[f].detectors.push_back(d);
    }
    for (uint32_t o = 0; o < refs.observables.size(); ++o) {
        std::vector<uint32_t> acc;
        for (uint32_t idx : refs.observables[o]) xor_merge(acc, rec_faults[idx]);
        for (uint32_t f : acc) faults[f].observables.push_back(o);
    }
    return faults;
}

void OutcomeForm::xor_in(const OutcomeForm& other) {
    constant ^= other.constant;
    if (other.gauge.size() > gauge.size()) gauge.resize(other.gauge.size(), 0);
    for (size_t i = 0; i < other.gauge.size(); ++i) gauge[i] ^= other.gauge[i];
}

bool FlowResult::all_deterministic() const {
    for (uint8_t ok : detector_gauge_free)
        if (!ok) return false;
    for (uint8_t ok : observable_gauge_free)
        if (!ok) return false;
    return true;
}

namespace {

// Aaronson-Gottesman tableau with affine phase forms: rows 0..n-1 are
// destabilizers, n..2n-1 stabilizers.
class Tableau {
  public:
    explicit Tableau(uint32_t n)
        : n_(n), x_(2 * n, n), z_(2 * n, n), phase_(2 * n) {
        for (uint32_t i = 0; i < n; ++i) {
            x_.set(i, i, true);
            z_.set(n + i, i, true);
        }
    }

    uint32_t n_gauge = 0;

    void apply_h(uint32_t q) {
        for (uint32_t i = 0; i < 2 * n_; ++i) {
            bool x = x_.get(i, q), z = z_.get(i, q);
            if (x && z) phase_[i].constant ^= 1;
            x_.set(i, q, z);
            z_.set(i, q, x);
        }
    }

    void apply_cnot(uint32_t c, uint32_t t) {
        for (uint32_t i = 0; i < 2 * n_; ++i) {
            bool xc = x_.get(i, c), zc = z_.get(i, c);
            bool xt = x_.get(i, t), zt = z_.get(i, t);
            if (xc && zt && (xt == zc)) phase_[i].constant ^= 1;
            x_.set(i, t, xt ^ xc);
            z_.set(i, c, zc ^ zt);
        }
    }

    void apply_cz(uint32_t a, uint32_t b) {
        apply_h(b);
        apply_cnot(a, b);
        apply_h(b);
    }

    OutcomeForm measure(uint32_t q, bool x_basis) {
        const BinaryMatrix& anti = x_basis ? z_ : x_;
        uint32_t p = n_;
        while (p < 2 * n_ && !anti.get(p, q)) ++p;
        if (p < 2 * n_) {
            // Random outcome: fresh gauge bit.
            for (uint32_t i = 0; i < 2 * n_; ++i)
                if (i != p && anti.get(i, q)) rowsum(i, p);
            copy_row(p - n_, p);
            zero_row(p);
            if (x_basis)
                x_.set(p, q, true);
            else
                z_.set(p, q, true);
            OutcomeForm out;
            out.gauge.assign(n_gauge / 64 + 1, 0);
            out.gauge[n_gauge >> 6] = uint64_t(1) << (n_gauge & 63);
            ++n_gauge;
            phase_[p] = out;
            return out;
        }
        // Deterministic: accumulate the stabilizer combination in a scratch row.
        scratch_x_.assign(x_.stride(), 0);
        scratch_z_.assign(z_.stride(), 0);
        scratch_phase_ = OutcomeForm{};
        for (uint32_t i = 0; i < n_; ++i)
            if (anti.get(i, q)) scratch_rowsum(i + n_);
        return scratch_phase_;
    }

    void conditional_pauli_z(uint32_t q, const OutcomeForm& f) {  // Z_q^f
        for (uint32_t i = 0; i < 2 * n_; ++i)
            if (x_.get(i, q)) phase_[i].xor_in(f);
    }
    void conditional_pauli_x(uint32_t q, const OutcomeForm& f) {  // X_q^f
        for (uint32_t i = 0; i < 2 * n_; ++i)
            if (z_.get(i, q)) phase_[i].xor_in(f);
    }

  private:
    static int phase_exponent(const uint64_t* x1, const uint64_t* z1, const uint64_t* x2,
                              const uint64_t* z2, size_t words) {
        // Sum over qubits of the Levi-Civita-style exponent, mod 4.
        int plus = 0, minus = 0;
        for (size_t w = 0; w < words; ++w) {
            uint64_t y1 = x1[w] & z1[w];
            uint64_t xonly = x1[w] & ~z1[w];
            uint64_t zonly = ~x1[w] & z1[w];
            plus += std::popcount((y1 & z2[w] & ~x2[w]) | (xonly & x2[w] & z2[w]) |
                                  (zonly & x2[w] & ~z2[w]));
            minus += std::popcount((y1 & x2[w] & ~z2[w]) | (xonly & z2[w] & ~x2[w]) |
                                   (zonly & x2[w] & z2[w]));
        }
        return ((plus - minus) % 4 + 4) % 4;
    }

    // row h <- row h * row i
    void rowsum(uint32_t h, uint32_t i) {
        int g = phase_exponent(x_.row_words(i), z_.row_words(i), x_.row_words(h), z_.row_words(h),
                               x_.stride());
        int total = (2 * (phase_[h].constant ? 1 : 0) + 2 * (phase_[i].constant ? 1 : 0) + g) % 4;
        if (total == 1 || total == 3) throw std::runtime_error("imaginary phase in tableau rowsum");
        OutcomeForm f = phase_[i];
        f.constant = false;
        phase_[h].xor_in(f);
        phase_[h].constant = total == 2;
        for (size_t w = 0; w < x_.stride(); ++w) {
            x_.row_words(h)[w] ^= x_.row_words(i)[w];
            z_.row_words(h)[w] ^= z_.row_words(i)[w];
        }
    }

    void scratch_rowsum(uint32_t i) {
        int g = phase_exponent(x_.row_words(i), z_.row_words(i), scratch_x_.data(), scratch_z_.data(),
                               x_.stride());
        int total = (2 * (scratch_phase_.constant ? 1 : 0) + 2 * (phase_[i].constant ? 1 : 0) + g) % 4;
        if (total == 1 || total == 3) throw std::runtime_error("imaginary phase in tableau rowsum");
        OutcomeForm f = phase_[i];
        f.constant = false;
        scratch_phase_.xor_in(f);
        scratch_phase_.constant = total == 2;
        for (size_t w = 0; w < x_.stride(); ++w) {
            scratch_x_[w] ^= x_.row_words(i)[w];
            scratch_z_[w] ^= z_.row_words(i)[w];
        }
    }

    void copy_row(uint32_t dst, uint32_t src) {
        for (size_t w = 0; w < x_.stride(); ++w) {
            x_.row_words(dst)[w] = x_.row_words(src)[w];
            z_.row_words(dst)[w] = z_.row_words(src)[w];
        }
        phase_[dst] = phase_[src];
    }

    void zero_row(uint32_t r) {
        for (size_t w = 0; w < x_.stride(); ++w) {
            x_.row_words(r)[w] = 0;
            z_.row_words(r)[w] = 0;
        }
        phase_[r] = OutcomeForm{};
    }

    uint32_t n_;
    BinaryMatrix x_, z_;
    std::vector<OutcomeForm> phase_;
    std::vector<uint64_t> scratch_x_, scratch_z_;
    OutcomeForm scratch_phase_;
};

}  // namespace

FlowResult stabilizer_flow(const Circuit& c) {
    Tableau tab(c.n_qubits);
    FlowResult result;
    RecordRefs refs = record_refs(c);
    result.records.reserve(refs.n_records);

    for (const auto& inst : c.instructions) {
        switch (inst.op) {
            case Op::H:
                for (int32_t q : inst.targets) tab.apply_h(static_cast<uint32_t>(q));
                break;
            case Op::Cnot:
                for (size_t t = 0; t + 1 < inst.targets.size(); t += 2)
                    tab.apply_cnot(static_cast<uint32_t>(inst.targets[t]),
                                   static_cast<uint32_t>(inst.targets[t + 1]));
                break;
            case Op::Cz:
                for (size_t t = 0; t + 1 < inst.targets.size(); t += 2)
                    tab.apply_cz(static_cast<uint32_t>(inst.targets[t]),
                                 static_cast<uint32_t>(inst.targets[t + 1]));
                break;
            case Op::ResetZ:
                for (int32_t q : inst.targets) {
                    OutcomeForm f = tab.measure(static_cast<uint32_t>(q), false);
                    tab.conditional_pauli_x(static_cast<uint32_t>(q), f);
                }
                break;
            case Op::ResetX:
                for (int32_t q : inst.targets) {
                    OutcomeForm f = tab.measure(static_cast<uint32_t>(q), true);
                    tab.conditional_pauli_z(static_cast<uint32_t>(q), f);
                }
                break;
            case Op::MeasureZ:
                for (int32_t q : inst.targets) result.records.push_back(tab.measure(static_cast<uint32_t>(q), false));
                break;
            case Op::MeasureX:
                for (int32_t q : inst.targets) result.records.push_back(tab.measure(static_cast<uint32_t>(q), true));
                break;
            default:
                break;  // noise annotations and markers are transparent here
        }
    }
    result.n_gauge = tab.n_gauge;

    auto reduce = [&](const std::vector<uint32_t>& idxs, std::vector<uint8_t>& ok_out,
                      std::vector<uint8_t>& val_out) {
        OutcomeForm acc;
        for (uint32_t idx : idxs) acc.xor_in(result.records[idx]);
        ok_out.push_back(acc.gauge_free() ? 1 : 0);
        val_out.push_back(acc.constant ? 1 : 0);
    };
    for (const auto& d : refs.detectors) reduce(d, result.detector_gauge_free, result.detector_value);
    for (const auto& o : refs.observables) reduce(o, result.observable_gauge_free, result.observable_value);
    return result;
}

std::vector<uint8_t> reference_run(const Circuit& c) {
    FlowResult flow = stabilizer_flow(c);
    if (!flow.all_deterministic())
        throw std::runtime_error("nondeterministic detector or observable in reference run");
    std::vector<uint8_t> rec;
    rec.reserve(flow.records.size());
    for (const auto& form : flow.records) rec.push_back(form.constant ? 1 : 0);
    return rec;
}

}  // namespace qforge
