"""Writes the sample geometries in this directory."""
import json
import math
from pathlib import Path

HERE = Path(__file__).resolve().parent


def cubic_line(a, b):
    return {"degree": 3, "control_points": [[a[k] + (b[k] - a[k]) * i / 3 for k in range(3)] for i in range(4)]}


def const_radius(r):
    return {"radius": {"degree": 3, "coefficients": [r] * 4}}


def unit(v):
    n = math.sqrt(sum(c * c for c in v))
    return [c / n for c in v]


def outlet(center, direction, gap, length, r, bend=None):
    d = unit(direction)
    a = [center[k] + gap * d[k] for k in range(3)]
    b = [center[k] + (gap + length) * d[k] for k in range(3)]
    c = cubic_line(a, b)
    if bend:
        # Bend the far half of the branch sideways while keeping the start tangent.
        for i, w in ((2, 0.3), (3, 1.0)):
            c["control_points"][i] = [c["control_points"][i][k] + w * bend[k] for k in range(3)]
    return c, const_radius(r)


def branch(bid, centerline, profile):
    return {"id": bid, "centerline": centerline, "profile": profile}


def write(name, doc):
    doc = {"units": "mm", **doc}
    (HERE / name).write_text(json.dumps(doc, indent=2) + "\n")


def bump(base, peak, width=0.12, n=41):
    # Radius coefficients with a Gaussian bump of height peak-base at mid-length.
    out = []
    for i in range(n):
        s = i / (n - 1)
        w = math.exp(-((s - 0.5) / width) ** 2)
        out.append(base + (peak - base) * (w if 0.15 <= s <= 0.85 else 0.0))
    return {"radius": {"degree": 3, "coefficients": out}}


def main():
    write("cylinder.json", {
        "branches": [branch("vessel", cubic_line([0, 0, 0], [0, 0, 200]), const_radius(1.25))],
        "options": {"cells_per_side": 10, "sections": 200},
    })
    write("cylinder_medium.json", {
        "branches": [branch("vessel", cubic_line([0, 0, 0], [0, 0, 200]), const_radius(1.25))],
        "options": {"cells_per_side": 20, "sections": 427},
    })
    write("straight_tube.json", {
        "branches": [branch("tube", cubic_line([0, 0, 0], [0, 0, 30]), const_radius(1.5))],
    })
    curved = {"degree": 3, "control_points": [[0, 0, 0], [0, 0, 10], [6, 2, 18], [14, 8, 22], [22, 16, 22], [28, 24, 18]]}
    write("curved_tube.json", {"branches": [branch("curved", curved, const_radius(1.5))]})
    write("stenosed_tube.json", {
        "branches": [branch("stenosis", cubic_line([0, 0, 0], [0, 0, 40]), bump(1.5, 0.75))],
    })
    for i, peak in enumerate((2.5, 3.5, 4.5), start=1):
        write(f"aneurysm_{i}.json", {
            "branches": [branch("aneurysm", cubic_line([0, 0, 0], [0, 0, 40]), bump(1.5, peak, 0.06))],
            "options": {"sections": 60},
        })

    # Planar Y, symmetric under x -> -x.
    inlet = branch("inlet", cubic_line([0, -20, 0], [0, -2.2, 0]), const_radius(1.0))
    a = outlet([0, 0, 0], [1, 1, 0], 2.2, 16, 0.8)
    b = outlet([0, 0, 0], [-1, 1, 0], 2.2, 16, 0.8)
    write("planar_y.json", {
        "branches": [inlet, branch("left", *b), branch("right", *a)],
        "junctions": [{"id": "Y", "ends": [{"branch": "inlet", "end": "tail"},
                                             {"branch": "right", "end": "head"},
                                             {"branch": "left", "end": "head"}]}],
    })

    inlet = branch("inlet", cubic_line([0, 0, -25], [0, 0, -2.5]), const_radius(1.2))
    a = outlet([0, 0, 0], [0.9, 0.3, 1.0], 2.4, 18, 0.9, bend=[0, 3, 2])
    b = outlet([0, 0, 0], [-0.7, 0.5, 1.1], 2.4, 15, 0.75, bend=[-2, -3, 1])
    write("nonplanar_bifurcation.json", {
        "branches": [inlet, branch("a", *a), branch("b", *b)],
        "junctions": [{"id": "B", "ends": [{"branch": "inlet", "end": "tail"},
                                             {"branch": "a", "end": "head"},
                                             {"branch": "b", "end": "head"}]}],
    })

    # Five sections spread around the z axis, tilted out of the xy plane.
    inlet = branch("inlet", cubic_line([0, -25, 0], [0, -3.0, 0]), const_radius(1.2))
    outs = []
    for k in range(1, 5):
        phi = -math.pi / 2 + 2 * math.pi * k / 5
        d = [math.cos(phi), math.sin(phi), 0.25 if k % 2 else -0.2]
        outs.append(branch(f"o{k}", *outlet([0, 0, 0], d, 3.0, 14, 0.75)))
    write("star5.json", {
        "branches": [inlet] + outs,
        "junctions": [{"id": "S", "ends": [{"branch": "inlet", "end": "tail"}] +
                       [{"branch": f"o{k}", "end": "head"} for k in range(1, 5)]}],
    })

    # Three junctions: root -> J1 -> (a, b); a -> J2 -> (c, d); b -> J3 -> (e, f).
    branches = [branch("root", cubic_line([0, 0, -20], [0, 0, -2.4]), const_radius(1.2))]
    junctions = []

    def split(jid, parent, tip, direction, r, children, length):
        d = unit(direction)
        for name, cdir, cr in children:
            branches.append(branch(name, *outlet(tip, cdir, 2.2 * r, length, cr)))
        junctions.append({"id": jid, "ends": [{"branch": parent, "end": "tail"}] +
                          [{"branch": name, "end": "head"} for name, _, _ in children]})

    split("J1", "root", [0, 0, 0], [0, 0, 1], 1.2, [("a", [1, 0.2, 1.2], 1.0), ("b", [-1, -0.1, 1.1], 0.95)], 18)

    def tip_of(name):
        for b in branches:
            if b["id"] == name:
                cp = b["centerline"]["control_points"]
                return cp[-1], [cp[-1][k] - cp[-2][k] for k in range(3)]

    for jid, parent, kids in (("J2", "a", [("c", 0.8), ("d", 0.7)]), ("J3", "b", [("e", 0.75), ("f", 0.7)])):
        tip, t = tip_of(parent)
        t = unit(t)
        # Pull the parent tail back so the junction center sits ahead of it.
        center = [tip[k] + 2.2 * t[k] for k in range(3)]
        side = unit([t[1], -t[0], 0.4])
        up = [t[1] * side[2] - t[2] * side[1], t[2] * side[0] - t[0] * side[2], t[0] * side[1] - t[1] * side[0]]
        dirs = [[t[k] + 0.9 * side[k] + 0.2 * up[k] for k in range(3)],
                [t[k] - 0.9 * side[k] - 0.3 * up[k] for k in range(3)]]
        split(jid, parent, center, t, 1.0, [(kids[0][0], dirs[0], kids[0][1]), (kids[1][0], dirs[1], kids[1][1])], 14)
    write("tree3.json", {"branches": branches, "junctions": junctions})


if __name__ == "__main__":
    main()
