# Dashboard pages for the quantum classifier.
