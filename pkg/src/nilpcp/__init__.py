"""Post correspondence problem for nilpotent and virtually nilpotent groups."""
