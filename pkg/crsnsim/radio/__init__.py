#!/usr/bin/env python3
"""
Radio models: primary-user activity, sensing, rates and energy
"""
