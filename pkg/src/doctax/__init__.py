"""Knowledge-type classification of API documentation."""
