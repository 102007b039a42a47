public class Main {
  public static void main(String[] args) {
    int while = 3;
    y = y + 1;
  }
}
