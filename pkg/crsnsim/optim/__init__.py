#!/usr/bin/env python3
"""
Intra- and inter-cluster allocation solvers and their cross-checks
"""
