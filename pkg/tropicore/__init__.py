# tropicore package
