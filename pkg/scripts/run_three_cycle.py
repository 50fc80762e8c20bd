"""Run the built-in three-cycle scenario and print flows, classes and the diagram."""
from hrnflow.builtin_scenarios import THREE_CYCLE
from hrnflow.packet_sim import load_scenario, run_instance
from hrnflow.render import render_ascii


def main() -> None:
    r = run_instance(load_scenario(THREE_CYCLE))
    for flow, c in zip(r.flows, r.classifications):
        print(f"subprogram {flow.rep.subprogram_index}: dims {flow.traversal()} -> theta {flow.theta}, "
              f"{c.kind.value} (margin {c.margin})")
    print()
    print(render_ascii(r.diagram))


if __name__ == "__main__":
    main()
