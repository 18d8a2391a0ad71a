"""Desk allocation by environmental comfort preference.

Occupants of shared flexible workspaces vote on thermal, visual, and aural
comfort during desk sessions; votes are joined with fixed per-zone IEQ sensor
readings, occupants are segmented into comfort types per dimension, and zones
are scored per type by the fraction of their readings inside each type's
empirical comfort band. Recommendations and cohort assignments rank desks by
that score.
"""

__version__ = "0.1.0"
