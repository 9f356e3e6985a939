""" Unit and system tests for metricfuse """
