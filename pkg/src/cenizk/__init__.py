"""Desk-scale laboratory for certified-everlasting NIZK protocols.

Subpackage map:
  state, epr          sparse statevector engine and the shared EPR network
  graphs              Hamiltonicity statements and witnesses
  hbnizk              hidden-bits-model NIZK with parallel repetition
  hbg                 hidden-bits generator (naor + trusted-dealer double)
  crs_nizk            hidden-bits->CRS compiler and the toy inner NIZK
  epr_protocol        certified-everlasting NIZK over shared EPR pairs
  crs_protocol        certified-everlasting NIZK in the CRS model
  attacks             splitting/cloning attacks and the deletion harness
  harness, cli        session runner, transcripts, experiments, CLI
"""

__version__ = "0.1.0"
