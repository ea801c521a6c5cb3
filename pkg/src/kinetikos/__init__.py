"""Kinetic epsilon-nets and their applications for polynomially moving points."""
