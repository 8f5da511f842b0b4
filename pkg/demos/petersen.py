"""Why the interaction graph must be a Cayley graph.

On the Petersen graph, with generator colors b (self-inverse) and r, the
path brrbr closes at some vertices and not at others, so no group
presentation can produce it. On Z² every word is closed everywhere or
nowhere.

Run: python demos/petersen.py
"""
from qcalab.cayley import apply_word, cayley_ball, homogeneity_path_check, petersen_graph, z2_presentation

g = petersen_graph()
w = g.word("brrbr")
for v in sorted(g.vertices):
    print(f"brrbr from {v} ends at {apply_word(g, v, w)}")
print("uniform on Petersen:", homogeneity_path_check(g, w).uniform)

p = z2_presentation()
ball = cayley_ball(p, 6)
inner = [v for v, x in ball.positions.items() if abs(x[0]) + abs(x[1]) <= 2]
print("aba^-1b^-1 uniform on Z²:", homogeneity_path_check(ball, p.word("aba^-1b^-1"), inner).uniform)
