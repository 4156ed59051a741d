"""
logsqg Test Suite
"""
