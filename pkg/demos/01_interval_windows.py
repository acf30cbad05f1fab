"""Interval algebra walkthrough: how constraint windows combine.

Everything the scheduler decides in phase 1 reduces to set operations on
half-open integer intervals.  This script builds a tiny example by hand:
an instrument is free outside two occupancy blocks, the activity has one
allowed start window, and the intersection of both (converted to
start-window space) is where it may start.
"""

from crosscheck import from_pairs, intersect, occupancy_to_start_windows, subtract

PLAN = from_pairs([[0, 10000]])
DURATION = 400

print("plan bounds:          ", PLAN.pairs())

# Two earlier activities hold the mast.
mast_busy = from_pairs([[1500, 2700], [5200, 6100]])
mast_free = subtract(PLAN, mast_busy)
print("mast busy:            ", mast_busy.pairs())
print("mast free (occupancy):", mast_free.pairs())

# "Free for the whole duration" becomes a start-window set: each free
# stretch shrinks by duration-1 seconds at the right edge.
mast_starts = occupancy_to_start_windows(mast_free, DURATION)
print(f"starts fitting {DURATION}s:  ", mast_starts.pairs())

# The activity's own allowed start window, already in start space.
execution = from_pairs([[2000, 5600 + 1]])  # inclusive start times 2000..5600
print("execution starts:     ", execution.pairs())

final = intersect(execution, mast_starts)
print("final valid starts:   ", final.pairs())

assert final.contains(2700) and final.contains(4800)
assert not final.contains(2500)  # would still overlap the first block

# Emptiness is meaningful: it is exactly the phase-1 failure condition.
tight = intersect(from_pairs([[1600, 2300]]), mast_starts)
print("a window inside the busy block leaves:", tight.pairs() or "nothing -> phase-1 failure")
