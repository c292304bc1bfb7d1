#include "holetune/model.hpp"

namespace holetune {

const BaseHole &ProgramModel::hole(int id) const {
  if (id < 1 || static_cast<std::size_t>(id) > holes.size())
    throw UnknownHole("unknown hole " + std::to_string(id));
  return holes[static_cast<std::size_t>(id - 1)];
}

const BaseHole &ProgramModel::holeNamed(const std::string &name) const {
  for (const auto &h : holes)
    if (h.name == name)
      return h;
  throw UnknownHole("unknown hole '" + name + "'");
}

ProgramModel analyzeProgram(Program program) {
  ProgramModel m;
  m.program = std::move(program);
  m.bindings = std::make_unique<Bindings>(m.program);
  if (!m.bindings->unboundUses().empty()) {
    const Expr &v = m.program.node(m.bindings->unboundUses().front());
    throw SyntaxError(v.loc, "unbound variable '" + v.name + "'");
  }
  m.functions = std::make_unique<FunctionTable>(m.program, *m.bindings);
  m.holes = listHoles(m.program, *m.functions);
  m.flow = dataFlow(m.program, *m.bindings, m.holes);
  m.graph = buildCallGraph(m.program, *m.bindings, *m.functions, m.holes, m.flow);
  m.colors = assignEdgeColors(m.graph);
  for (const auto &h : m.holes)
    m.contexts.push_back(contextStrings(m.graph, h.id));
  return m;
}

} // namespace holetune
