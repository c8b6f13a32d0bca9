# Empty file to make apps a Python package