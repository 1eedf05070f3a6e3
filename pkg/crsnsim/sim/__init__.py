#!/usr/bin/env python3
"""
Period-driven simulation: topology, random streams, strategies and the engine
"""
