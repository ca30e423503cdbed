import os

# Must happen before numba is imported anywhere: allows the thread-invariance
# checks to request up to 8 workers even on smaller CI boxes.
os.environ.setdefault("NUMBA_NUM_THREADS", "8")
