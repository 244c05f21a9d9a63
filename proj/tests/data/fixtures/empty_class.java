package edu.playground;

public class Placeholder {
}
