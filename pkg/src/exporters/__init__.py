"""Exporters module"""
from .excel_exporter import ExcelExporter
from .report_exporter import ReportExporter

__all__ = ['ExcelExporter', 'ReportExporter']
