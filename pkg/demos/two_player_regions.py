"""Text map of the two-player PD outcomes over (q1, c) with q2 fixed."""

import numpy as np

from felix.games import pd2_classify

SYMBOL = {"NE": ".", "BE": "#", "AE_1_altruist": "1", "AE_2_altruist": "2"}


def main(q2: float = 0.4, cols: int = 60, rows: int = 24) -> None:
    print(f"q2 = {q2}; rows: cost c from 1 (top) to 0, columns: q1 from 0 to 1")
    print("legend: . both selfish, # both prosocial, 1/2 that player turns altruist")
    for c in np.linspace(1, 0, rows + 2)[1:-1]:
        line = "".join(SYMBOL[pd2_classify(q1, q2, c).label] for q1 in np.linspace(0, 0.99, cols))
        print(f"c={c:4.2f} {line}")


if __name__ == "__main__":
    main()
