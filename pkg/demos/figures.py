"""Verify the figure configurations and write one SVG per figure next to this script."""
from pathlib import Path

from flatpack.builders import make_figure_configuration
from flatpack.packing import classify_slit_relation, contacts_graph, verify_configuration
from flatpack.render import render_svg

OUT = Path(__file__).with_name("out")


def main():
    OUT.mkdir(exist_ok=True)
    for fid in ("Fig6", "Fig7", "Fig8", "Fig9", "Fig10", "Fig11"):
        s, c = make_figure_configuration(fid)
        rep = verify_configuration(c, depth=6)
        g = contacts_graph(c)
        rels = [classify_slit_relation(circ, seg, (a, b)) for circ in c.circles for seg, a, b in c.slits]
        print(f"{fid}: genus {s.genus}, circles k={[circ.k for circ in c.circles]}, "
              f"verified={rep.passed}, contacts={g.group_multiplicities()}, slit relations={rels}")
        svg = render_svg(s, c, c.slits, title=fid)
        (OUT / f"{fid}.svg").write_text(svg)
    print(f"SVGs written to {OUT}")


if __name__ == "__main__":
    main()
