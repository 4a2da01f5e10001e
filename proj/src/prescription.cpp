#include "wom/prescription.hpp"

#include <string>

#include "wom/error.hpp"

namespace wom {

namespace {

std::vector<int> radices_of(const InfoSchema& s, const Cardinalities& card) { return Domain(s, card).radices(); }

// Splits every memory realization of agent j at t into the owner's
// (conditioning, domain) pair.
struct Split {
  Domain mem, cond, dom;
  std::vector<int> cond_pos, dom_pos;
};

Split split_for(const Instance& inst, int t, int owner, int j) {
  const InfoSchema& m = inst.info.memory(t, j);
  const InfoSchema& c = inst.info.conditioning(t, owner, j);
  const InfoSchema& d = inst.info.prescription_domain(t, owner, j);
  return {Domain(m, inst.card), Domain(c, inst.card), Domain(d, inst.card), positions_in(c, m), positions_in(d, m)};
}

size_t sub_index(const std::vector<int>& values, const std::vector<int>& pos, const Domain& dom) {
  size_t index = 0;
  for (size_t n = 0; n < pos.size(); ++n)
    index = index * static_cast<size_t>(dom.radices()[n]) + static_cast<size_t>(values[static_cast<size_t>(pos[n])]);
  return index;
}

std::string agent_label(int k) { return "agent " + std::to_string(k + 1); }

}  // namespace

Prescription make_prescription(const Instance& inst, int owner, int target, int t, std::vector<int> table) {
  Prescription p;
  p.owner = owner;
  p.target = target;
  p.time = t;
  p.domain = inst.info.prescription_domain(t, owner, target);
  p.radices = radices_of(p.domain, inst.card);
  if (table.size() != Domain(p.radices).size())
    throw Error(ErrorKind::DomainMismatch, "prescription table has the wrong size");
  p.table = std::move(table);
  return p;
}

int apply_prescription(const Prescription& p, std::span<const int> realization) {
  const Domain dom(p.radices);
  const size_t index = dom.encode(realization);
  if (index >= p.table.size()) throw Error(ErrorKind::OutOfRange, "prescription table shorter than its domain");
  return p.table[index];
}

Prescription PrescriptionStrategy::prescription(const Instance& inst, int t, int target, size_t conditioning_index) const {
  const PrescriptionLaw& law = laws.at(static_cast<size_t>(t)).at(static_cast<size_t>(target));
  if (conditioning_index >= law.tables.size()) throw Error(ErrorKind::OutOfRange, "conditioning realization out of range");
  Prescription p;
  p.owner = owner;
  p.target = target;
  p.time = t;
  p.domain = law.domain;
  p.radices = radices_of(law.domain, inst.card);
  p.table = law.tables[conditioning_index];
  return p;
}

CompletePrescription PrescriptionStrategy::complete(const Instance& inst, int t, std::span<const int> accessible_values) const {
  const InfoSchema& a = inst.info.accessible(t, owner);
  if (accessible_values.size() != a.size()) throw Error(ErrorKind::OutOfRange, "accessible realization has the wrong length");
  CompletePrescription theta;
  theta.owner = owner;
  theta.time = t;
  const std::vector<int> vals(accessible_values.begin(), accessible_values.end());
  for (int i = 0; i < inst.agents(); ++i) {
    const InfoSchema& c = inst.info.conditioning(t, owner, i);
    const Domain cd(c, inst.card);
    theta.parts.push_back(prescription(inst, t, i, sub_index(vals, positions_in(c, a), cd)));
  }
  return theta;
}

void for_each_table(size_t domain_size, int control_size, const std::function<bool(const std::vector<int>&)>& visit) {
  std::vector<int> table(domain_size, 0);
  while (true) {
    if (!visit(table)) return;
    size_t n = domain_size;
    while (n > 0) {
      --n;
      if (++table[n] < control_size) break;
      table[n] = 0;
      if (n == 0) return;
    }
    if (domain_size == 0) return;
  }
}

std::vector<std::vector<int>> enumerate_tables(const InfoSchema& domain, const Cardinalities& card, int control_size,
                                               uint64_t cap) {
  const Domain dom(domain, card);
  BigInt count = 1;
  for (size_t n = 0; n < dom.size(); ++n) {
    count *= control_size;
    if (count > cap) break;
  }
  if (dom.size() > cap || count > cap) {
    const std::string need = dom.size() <= 256
                                 ? BigInt(boost::multiprecision::pow(BigInt(control_size), static_cast<unsigned>(dom.size()))).str()
                                 : std::to_string(control_size) + "^" + std::to_string(dom.size());
    throw Error(ErrorKind::CapExceeded, "enumeration needs " + need + " prescriptions, cap is " + std::to_string(cap));
  }
  std::vector<std::vector<int>> out;
  for_each_table(dom.size(), control_size, [&](const std::vector<int>& t) {
    out.push_back(t);
    return true;
  });
  return out;
}

std::vector<Prescription> enumerate_prescriptions(const Instance& inst, int owner, int target, int t, uint64_t cap) {
  std::vector<Prescription> out;
  for (auto& table : enumerate_tables(inst.info.prescription_domain(t, owner, target), inst.card,
                                      inst.card.control[static_cast<size_t>(target)], cap))
    out.push_back(make_prescription(inst, owner, target, t, std::move(table)));
  return out;
}

BigInt count_strategies(const Instance& inst, CountMode mode) {
  const int K = inst.agents();
  if (mode.kind == CountMode::Kind::Brute) {
    BigInt total = 1;
    for (int t = 0; t <= inst.horizon(); ++t)
      for (int k = 0; k < K; ++k)
        total *= boost::multiprecision::pow(BigInt(inst.card.control[static_cast<size_t>(k)]),
                                            static_cast<unsigned>(Domain(inst.info.memory(t, k), inst.card).size()));
    return total;
  }
  const int k = mode.agent;
  if (k < 0 || k >= K) throw Error(ErrorKind::InvalidAgent, "no " + agent_label(k));
  BigInt total = 0;
  for (int t = 0; t <= inst.horizon(); ++t) {
    BigInt per = 1;
    for (int i = 0; i < K; ++i)
      per *= boost::multiprecision::pow(
          BigInt(inst.card.control[static_cast<size_t>(i)]),
          static_cast<unsigned>(Domain(inst.info.prescription_domain(t, k, i), inst.card).size()));
    total += per * BigInt(Domain(inst.info.accessible(t, k), inst.card).size());
  }
  return total;
}

void check_prescription_strategy(const Instance& inst, const PrescriptionStrategy& psi) {
  if (psi.owner < 0 || psi.owner >= inst.agents()) throw Error(ErrorKind::DomainMismatch, "strategy owner out of range");
  if (psi.laws.size() != static_cast<size_t>(inst.horizon() + 1))
    throw Error(ErrorKind::DomainMismatch, "prescription strategy must cover every time");
  for (int t = 0; t <= inst.horizon(); ++t) {
    if (psi.laws[static_cast<size_t>(t)].size() != static_cast<size_t>(inst.agents()))
      throw Error(ErrorKind::DomainMismatch, "prescription strategy must have a law for every target");
    for (int i = 0; i < inst.agents(); ++i) {
      const PrescriptionLaw& law = psi.laws[static_cast<size_t>(t)][static_cast<size_t>(i)];
      if (law.conditioning != inst.info.conditioning(t, psi.owner, i) ||
          law.domain != inst.info.prescription_domain(t, psi.owner, i))
        throw Error(ErrorKind::DomainMismatch, "law for " + agent_label(i) + " at t=" + std::to_string(t) +
                                                   " does not use the expected schemas");
      const size_t nc = Domain(law.conditioning, inst.card).size();
      const size_t nd = Domain(law.domain, inst.card).size();
      if (law.tables.size() != nc) throw Error(ErrorKind::DomainMismatch, "law is not total over its conditioning set");
      for (const auto& tab : law.tables) {
        if (tab.size() != nd) throw Error(ErrorKind::DomainMismatch, "prescription table has the wrong size");
        for (int u : tab)
          if (u < 0 || u >= inst.card.control[static_cast<size_t>(i)])
            throw Error(ErrorKind::DomainMismatch, "prescribed control out of range for " + agent_label(i));
      }
    }
  }
}

// Agent j's memory always splits into the owner's conditioning set and the
// prescription domain, so the two representations are in bijection.
ControlStrategy strategy_to_control(const Instance& inst, const PrescriptionStrategy& psi) {
  check_prescription_strategy(inst, psi);
  ControlStrategy g;
  g.tables.resize(static_cast<size_t>(inst.horizon() + 1));
  for (int t = 0; t <= inst.horizon(); ++t)
    for (int j = 0; j < inst.agents(); ++j) {
      const Split sp = split_for(inst, t, psi.owner, j);
      const PrescriptionLaw& law = psi.laws[static_cast<size_t>(t)][static_cast<size_t>(j)];
      std::vector<int> tab(sp.mem.size());
      for (size_t m = 0; m < sp.mem.size(); ++m) {
        const std::vector<int> vals = sp.mem.decode(m);
        tab[m] = law.tables[sub_index(vals, sp.cond_pos, sp.cond)][sub_index(vals, sp.dom_pos, sp.dom)];
      }
      g.tables[static_cast<size_t>(t)].push_back(std::move(tab));
    }
  return g;
}

std::vector<std::vector<int>> strategy_to_control_law(const Instance& inst, const PrescriptionStrategy& psi) {
  ControlStrategy g = strategy_to_control(inst, psi);
  std::vector<std::vector<int>> own;
  for (auto& stage : g.tables) own.push_back(std::move(stage[static_cast<size_t>(psi.owner)]));
  return own;
}

PrescriptionStrategy control_law_to_strategy(const Instance& inst, const ControlStrategy& g, int owner) {
  check_strategy(inst, g);
  if (owner < 0 || owner >= inst.agents()) throw Error(ErrorKind::InvalidAgent, "no " + agent_label(owner));
  PrescriptionStrategy psi;
  psi.owner = owner;
  psi.laws.resize(static_cast<size_t>(inst.horizon() + 1));
  for (int t = 0; t <= inst.horizon(); ++t)
    for (int j = 0; j < inst.agents(); ++j) {
      const Split sp = split_for(inst, t, owner, j);
      PrescriptionLaw law;
      law.target = j;
      law.conditioning = inst.info.conditioning(t, owner, j);
      law.domain = inst.info.prescription_domain(t, owner, j);
      law.tables.assign(sp.cond.size(), std::vector<int>(sp.dom.size(), 0));
      const auto& tab = g.tables[static_cast<size_t>(t)][static_cast<size_t>(j)];
      for (size_t m = 0; m < sp.mem.size(); ++m) {
        const std::vector<int> vals = sp.mem.decode(m);
        law.tables[sub_index(vals, sp.cond_pos, sp.cond)][sub_index(vals, sp.dom_pos, sp.dom)] = tab[m];
      }
      psi.laws[static_cast<size_t>(t)].push_back(std::move(law));
    }
  return psi;
}

PrescriptionStrategy translate_strategy(const Instance& inst, const PrescriptionStrategy& psi, int dst_owner) {
  if (dst_owner == psi.owner) {
    check_prescription_strategy(inst, psi);
    return psi;
  }
  return control_law_to_strategy(inst, strategy_to_control(inst, psi), dst_owner);
}

}  // namespace wom
